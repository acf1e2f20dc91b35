#pragma once

// Flat key-value run configuration with one section per module. Defaults are
// the reference channel parameters; flags may override file values.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdqkd/channel.hpp"
#include "hdqkd/protocol.hpp"

namespace hdqkd {

struct RunConfig {
  // [state]
  int d = 7;
  // [channel]
  double mu = 0.1;
  double f_rep = 4000.0;
  double pulse_width = 125e-9;
  std::vector<std::pair<std::string, double>> link_components =
      default_link_budget().components;
  double eta = 0.65;
  double dark_rate = 50.0;
  double gate_width = 125e-9;
  double after_pulse_prob = 0.003;
  double epsilon = 0.04;
  double delta = 0.065;
  std::string crosstalk_model = "uniform";  // uniform | neighbor
  double neighbor_decay = 0.5;
  // [protocol]
  std::uint64_t pulses = 100000;
  double sample_fraction = 0.1;
  double abort_threshold = 0.0;  // 0 = coherent bound
  std::string transport = "inproc";  // inproc | tcp
  std::string tcp_host = "127.0.0.1";
  std::uint16_t tcp_port = 0;  // 0 = ephemeral
  // [cascade]
  int cascade_passes = 4;
  std::size_t cascade_block = 0;  // 0 = auto
  // [privacy]
  long long safety_margin_bits = 0;
  // [seeds]
  std::uint64_t seed_source = 11;
  std::uint64_t seed_bob_basis = 22;
  std::uint64_t seed_channel = 33;
  std::uint64_t seed_shuffle = 44;
  std::uint64_t seed_pa = 55;
  std::uint64_t seed_sample = 66;

  ChannelModel channel_model() const {
    ChannelModel m;
    m.d = d;
    m.pulse = PulseConfig{mu, f_rep, pulse_width};
    m.link = LinkBudget{link_components};
    m.detector = DetectorModel{eta, dark_rate, gate_width, after_pulse_prob, d, epsilon};
    const CrosstalkModel xm =
        crosstalk_model == "neighbor" ? CrosstalkModel::Neighbor : CrosstalkModel::Uniform;
    m.crosstalk = synthetic_crosstalk_matrix(d, delta, xm, neighbor_decay);
    m.sorter_delta = delta;
    m.validate();
    return m;
  }

  SessionConfig session_config() const {
    SessionConfig s;
    s.d = d;
    s.num_pulses = pulses;
    s.sample_fraction = sample_fraction;
    s.abort_threshold = abort_threshold;
    s.cascade = CascadeConfig{cascade_passes, cascade_block, 0};
    s.safety_margin_bits = safety_margin_bits;
    s.source_seed = seed_source;
    s.bob_basis_seed = seed_bob_basis;
    s.channel_seed = seed_channel;
    s.shuffle_seed = seed_shuffle;
    s.pa_seed = seed_pa;
    s.sample_seed = seed_sample;
    return s;
  }

  void validate() const {
    Dimension dim(d);  // throws on even/small d
    (void)dim;
    channel_model();
    if (sample_fraction < 0.0 || sample_fraction >= 1.0)
      throw std::invalid_argument("sample_fraction outside [0,1)");
    if (crosstalk_model != "uniform" && crosstalk_model != "neighbor")
      throw std::invalid_argument("crosstalk_model must be uniform or neighbor");
    if (transport != "inproc" && transport != "tcp")
      throw std::invalid_argument("transport must be inproc or tcp");
    if (cascade_passes < 1) throw std::invalid_argument("cascade_passes must be >= 1");
  }

  std::string dump() const;
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
  }
};

inline std::string RunConfig::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "[state]\n"
     << "d = " << d << "\n\n"
     << "[channel]\n"
     << "mu = " << mu << "\n"
     << "f_rep = " << f_rep << "\n"
     << "pulse_width = " << pulse_width << "\n";
  os << "link = ";
  for (std::size_t i = 0; i < link_components.size(); ++i) {
    if (i) os << ",";
    os << link_components[i].first << ":" << link_components[i].second;
  }
  os << "\n"
     << "eta = " << eta << "\n"
     << "dark_rate = " << dark_rate << "\n"
     << "gate_width = " << gate_width << "\n"
     << "after_pulse_prob = " << after_pulse_prob << "\n"
     << "epsilon = " << epsilon << "\n"
     << "delta = " << delta << "\n"
     << "crosstalk_model = " << crosstalk_model << "\n"
     << "neighbor_decay = " << neighbor_decay << "\n\n"
     << "[protocol]\n"
     << "pulses = " << pulses << "\n"
     << "sample_fraction = " << sample_fraction << "\n"
     << "abort_threshold = " << abort_threshold << "\n"
     << "transport = " << transport << "\n"
     << "tcp_host = " << tcp_host << "\n"
     << "tcp_port = " << tcp_port << "\n\n"
     << "[cascade]\n"
     << "passes = " << cascade_passes << "\n"
     << "block = " << cascade_block << "\n\n"
     << "[privacy]\n"
     << "safety_margin_bits = " << safety_margin_bits << "\n\n"
     << "[seeds]\n"
     << "source = " << seed_source << "\n"
     << "bob_basis = " << seed_bob_basis << "\n"
     << "channel = " << seed_channel << "\n"
     << "shuffle = " << seed_shuffle << "\n"
     << "pa = " << seed_pa << "\n"
     << "sample = " << seed_sample << "\n";
  return os.str();
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}
}  // namespace detail

inline RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  auto bad = [](const std::string& what) {
    return std::invalid_argument("config: " + what);
  };
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw bad("malformed line: " + line);
    const std::string key = section + "." + detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "state.d") cfg.d = std::stoi(value);
      else if (key == "channel.mu") cfg.mu = std::stod(value);
      else if (key == "channel.f_rep") cfg.f_rep = std::stod(value);
      else if (key == "channel.pulse_width") cfg.pulse_width = std::stod(value);
      else if (key == "channel.link") {
        cfg.link_components.clear();
        std::istringstream comps(value);
        std::string comp;
        while (std::getline(comps, comp, ',')) {
          const auto colon = comp.find(':');
          if (colon == std::string::npos) throw bad("link component needs label:efficiency");
          cfg.link_components.emplace_back(detail::trim(comp.substr(0, colon)),
                                           std::stod(comp.substr(colon + 1)));
        }
      } else if (key == "channel.eta") cfg.eta = std::stod(value);
      else if (key == "channel.dark_rate") cfg.dark_rate = std::stod(value);
      else if (key == "channel.gate_width") cfg.gate_width = std::stod(value);
      else if (key == "channel.after_pulse_prob") cfg.after_pulse_prob = std::stod(value);
      else if (key == "channel.epsilon") cfg.epsilon = std::stod(value);
      else if (key == "channel.delta") cfg.delta = std::stod(value);
      else if (key == "channel.crosstalk_model") cfg.crosstalk_model = value;
      else if (key == "channel.neighbor_decay") cfg.neighbor_decay = std::stod(value);
      else if (key == "protocol.pulses") cfg.pulses = std::stoull(value);
      else if (key == "protocol.sample_fraction") cfg.sample_fraction = std::stod(value);
      else if (key == "protocol.abort_threshold") cfg.abort_threshold = std::stod(value);
      else if (key == "protocol.transport") cfg.transport = value;
      else if (key == "protocol.tcp_host") cfg.tcp_host = value;
      else if (key == "protocol.tcp_port") cfg.tcp_port = static_cast<std::uint16_t>(std::stoul(value));
      else if (key == "cascade.passes") cfg.cascade_passes = std::stoi(value);
      else if (key == "cascade.block") cfg.cascade_block = std::stoull(value);
      else if (key == "privacy.safety_margin_bits") cfg.safety_margin_bits = std::stoll(value);
      else if (key == "seeds.source") cfg.seed_source = std::stoull(value);
      else if (key == "seeds.bob_basis") cfg.seed_bob_basis = std::stoull(value);
      else if (key == "seeds.channel") cfg.seed_channel = std::stoull(value);
      else if (key == "seeds.shuffle") cfg.seed_shuffle = std::stoull(value);
      else if (key == "seeds.pa") cfg.seed_pa = std::stoull(value);
      else if (key == "seeds.sample") cfg.seed_sample = std::stoull(value);
      else throw bad("unknown key: " + key);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw bad("bad value for " + key + ": " + value);
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace hdqkd
