#pragma once

// Weak-coherent-pulse source, link budget, detector model, crosstalk matrix
// synthesis/estimation, and the per-pulse Monte-Carlo detection simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdqkd/hilbert.hpp"

namespace hdqkd {

struct LinkBudget {
  std::vector<std::pair<std::string, double>> components;  // (label, efficiency in (0,1])

  void validate() const {
    if (components.empty()) throw std::invalid_argument("link budget must not be empty");
    for (const auto& [label, eff] : components)
      if (!(eff > 0.0) || eff > 1.0)
        throw std::invalid_argument("component '" + label + "' efficiency outside (0,1]");
  }
};

inline double t_link(const LinkBudget& budget) {
  budget.validate();
  double product = 1.0;
  for (const auto& [label, eff] : budget.components) product *= eff;
  return product;
}

// Reference component chain: sorter, two SLM passes, fiber coupling.
inline LinkBudget default_link_budget() {
  return LinkBudget{{{"sorter", 0.85}, {"slm_fanout", 0.45}, {"slm_correction", 0.45}, {"fiber_coupling", 0.18}}};
}

struct DetectorModel {
  double quantum_efficiency = 0.65;  // eta
  double dark_rate = 50.0;           // counts/s per detector
  double gate_width = 125e-9;        // s
  double after_pulse_prob = 0.003;
  int num_detectors = 7;
  double effective_epsilon = 0.04;  // conditional background-error probability

  void validate() const {
    if (!(quantum_efficiency > 0.0) || quantum_efficiency > 1.0)
      throw std::invalid_argument("quantum efficiency outside (0,1]");
    if (dark_rate < 0.0 || gate_width < 0.0) throw std::invalid_argument("negative detector rate");
    if (after_pulse_prob < 0.0 || after_pulse_prob >= 1.0)
      throw std::invalid_argument("after-pulse probability outside [0,1)");
    if (num_detectors < 1) throw std::invalid_argument("need >= 1 detector");
    if (effective_epsilon < 0.0 || effective_epsilon >= 1.0)
      throw std::invalid_argument("epsilon outside [0,1)");
  }

  // Per-pulse dark-count click probability summed over the detector array.
  double dark_click_prob() const { return dark_rate * gate_width * num_detectors; }
};

struct PulseConfig {
  double mu = 0.1;        // mean photons per pulse
  double f_rep = 4000.0;  // pulses/s
  double pulse_width = 125e-9;

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(f_rep > 0.0)) throw std::invalid_argument("f_rep must be positive");
  }
};

// Poisson tail P(n >= 2) = 1 - e^-mu - mu e^-mu, evaluated exactly.
inline double p_multi(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  return 1.0 - std::exp(-mu) - mu * std::exp(-mu);
}

inline int sample_photon_number(double mu, std::mt19937_64& rng) {
  std::poisson_distribution<int> dist(mu);
  return dist(rng);
}

enum class CrosstalkModel { Uniform, Neighbor };

// Per-basis row-stochastic matrix, entry [i][j] = P(detect j | sent i).
struct CrosstalkMatrix {
  int d = 0;
  std::vector<std::vector<double>> oam;
  std::vector<std::vector<double>> ang;

  const std::vector<std::vector<double>>& rows(Basis b) const {
    return b == Basis::OAM ? oam : ang;
  }

  void validate() const {
    for (const auto* m : {&oam, &ang}) {
      if (m->size() != static_cast<std::size_t>(d)) throw std::invalid_argument("matrix size != d");
      for (const auto& row : *m) {
        if (row.size() != static_cast<std::size_t>(d))
          throw std::invalid_argument("matrix row size != d");
        double sum = 0.0;
        for (double p : row) {
          if (p < 0.0 || p > 1.0) throw std::invalid_argument("matrix entry outside [0,1]");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("matrix row not stochastic");
      }
    }
  }
};

// Diagonal 1-delta; off-diagonal mass delta split uniformly or with
// geometric decay toward nearest neighbors.
inline CrosstalkMatrix synthetic_crosstalk_matrix(int d, double delta,
                                                  CrosstalkModel model = CrosstalkModel::Uniform,
                                                  double neighbor_decay = 0.5) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("delta outside [0,1)");
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d),
                                        std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    row[static_cast<std::size_t>(i)] = 1.0 - delta;
    if (delta == 0.0) continue;
    if (model == CrosstalkModel::Uniform) {
      for (int j = 0; j < d; ++j)
        if (j != i) row[static_cast<std::size_t>(j)] = delta / (d - 1);
    } else {
      double weight_sum = 0.0;
      std::vector<double> weights(static_cast<std::size_t>(d), 0.0);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        weights[static_cast<std::size_t>(j)] = std::pow(neighbor_decay, std::abs(j - i) - 1);
        weight_sum += weights[static_cast<std::size_t>(j)];
      }
      for (int j = 0; j < d; ++j)
        if (j != i) row[static_cast<std::size_t>(j)] = delta * weights[static_cast<std::size_t>(j)] / weight_sum;
    }
  }
  CrosstalkMatrix m{d, rows, rows};
  m.validate();
  return m;
}

enum class OutcomeKind { NoClick, Click, MultiClick };

struct DetectionEvent {
  std::uint64_t pulse_index = 0;
  OutcomeKind kind = OutcomeKind::NoClick;
  int detector = -1;            // valid when kind == Click
  std::vector<int> detectors;   // valid when kind == MultiClick
  Basis recv_basis = Basis::OAM;
  int sent_symbol = 0;
  Basis sent_basis = Basis::OAM;
};

struct ChannelModel {
  int d = 7;
  PulseConfig pulse;
  LinkBudget link = default_link_budget();
  DetectorModel detector;
  CrosstalkMatrix crosstalk = synthetic_crosstalk_matrix(7, 0.065);
  double sorter_delta = 0.065;

  void validate() const {
    pulse.validate();
    link.validate();
    detector.validate();
    crosstalk.validate();
    if (crosstalk.d != d) throw std::invalid_argument("crosstalk dimension mismatch");
  }

  double signal_click_prob() const { return pulse.mu * t_link(link) * detector.quantum_efficiency; }

  // Total per-pulse background click probability, calibrated so the
  // conditional symbol-error rate among matched-basis clicks converges to
  // delta + epsilon. A background click lands uniformly on d detectors and
  // is wrong with probability (d-1)/d, so:
  //   beta * (d-1)/d / (s + beta) = epsilon / (1 - ... )  =>
  //   beta = epsilon * s / ((d-1)/d - delta - epsilon).
  // The floor is the physical dark-count probability.
  double background_click_prob() const {
    const double eps = detector.effective_epsilon;
    const double s = signal_click_prob();
    const double wrong_frac = static_cast<double>(d - 1) / d;
    const double denom = wrong_frac - sorter_delta - eps;
    double beta = 0.0;
    if (eps > 0.0 && denom > 0.0) beta = eps * s / denom;
    return std::max(beta, detector.dark_click_prob());
  }
};

// Stateful per-stream simulator (after-pulsing couples consecutive pulses).
class PulseSimulator {
 public:
  PulseSimulator(ChannelModel model, std::uint64_t seed) : model_(std::move(model)), rng_(seed) {
    model_.validate();
    survival_ = t_link(model_.link) * model_.detector.quantum_efficiency;
    // The calibrated background budget already accounts for after-pulse
    // clicks (epsilon's 0.15% slice); keep the total fixed by carving the
    // expected after-pulse rate out of the uniform background term.
    const double total_bg = model_.background_click_prob();
    const double approx_click = model_.signal_click_prob() + total_bg;
    const double ap = approx_click * model_.detector.after_pulse_prob;
    uniform_bg_ = std::max(0.0, total_bg - ap);
  }

  const ChannelModel& model() const { return model_; }

  DetectionEvent simulate(std::uint64_t pulse_index, int sent_symbol, Basis sent_basis,
                          Basis recv_basis) {
    DetectionEvent ev;
    ev.pulse_index = pulse_index;
    ev.sent_symbol = sent_symbol;
    ev.sent_basis = sent_basis;
    ev.recv_basis = recv_basis;

    std::set<int> fired;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int photons = sample_photon_number(model_.pulse.mu, rng_);
    for (int p = 0; p < photons; ++p) {
      if (unit(rng_) >= survival_) continue;
      fired.insert(detect_photon(sent_symbol, sent_basis, recv_basis, unit));
    }

    // Uniform background (dark counts + stray light), split across detectors.
    const double per_detector_bg = uniform_bg_ / model_.d;
    for (int j = 0; j < model_.d; ++j)
      if (unit(rng_) < per_detector_bg) fired.insert(j);

    // After-pulse: the detector that fired on the previous pulse may re-fire.
    if (last_click_ >= 0 && unit(rng_) < model_.detector.after_pulse_prob)
      fired.insert(last_click_);

    if (fired.empty()) {
      ev.kind = OutcomeKind::NoClick;
      last_click_ = -1;
    } else if (fired.size() == 1) {
      ev.kind = OutcomeKind::Click;
      ev.detector = *fired.begin();
      last_click_ = ev.detector;
    } else {
      ev.kind = OutcomeKind::MultiClick;
      ev.detectors.assign(fired.begin(), fired.end());
      last_click_ = *fired.rbegin();
    }
    return ev;
  }

 private:
  int detect_photon(int sent_symbol, Basis sent_basis, Basis recv_basis,
                    std::uniform_real_distribution<double>& unit) {
    if (sent_basis != recv_basis) {
      // Mutually unbiased bases: the wrong-basis outcome is uniform.
      std::uniform_int_distribution<int> any(0, model_.d - 1);
      return any(rng_);
    }
    const auto& row = model_.crosstalk.rows(recv_basis)[static_cast<std::size_t>(sent_symbol)];
    double u = unit(rng_);
    for (int j = 0; j < model_.d; ++j) {
      u -= row[static_cast<std::size_t>(j)];
      if (u <= 0.0) return j;
    }
    return model_.d - 1;
  }

  ChannelModel model_;
  std::mt19937_64 rng_;
  double survival_ = 0.0;
  double uniform_bg_ = 0.0;
  int last_click_ = -1;
};

// Empirical per-basis crosstalk matrix from matched-basis single-click
// events. A row with no events is an error, never a silent zero row.
inline CrosstalkMatrix estimate_matrix(const std::vector<DetectionEvent>& events, int d) {
  CrosstalkMatrix m;
  m.d = d;
  const std::pair<Basis, std::vector<std::vector<double>>*> targets[] = {{Basis::OAM, &m.oam},
                                                                         {Basis::ANG, &m.ang}};
  for (const auto& [basis, rows] : targets) {
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(d),
                                            std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (const auto& ev : events) {
      if (ev.kind != OutcomeKind::Click) continue;
      if (ev.sent_basis != basis || ev.recv_basis != basis) continue;
      counts[static_cast<std::size_t>(ev.sent_symbol)][static_cast<std::size_t>(ev.detector)] += 1.0;
    }
    for (int i = 0; i < d; ++i) {
      auto& row = counts[static_cast<std::size_t>(i)];
      double total = 0.0;
      for (double c : row) total += c;
      if (total == 0.0)
        throw std::runtime_error("estimate_matrix: no single-click events for " +
                                 std::string(basis_name(basis)) + " symbol " + std::to_string(i));
      for (double& c : row) c /= total;
    }
    *rows = std::move(counts);
  }
  return m;
}

}  // namespace hdqkd
