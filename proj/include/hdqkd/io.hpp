#pragma once

// File artifacts shared by the CLI stages: detection-event CSV logs, symbol
// and bit files, raw key bytes.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdqkd/channel.hpp"
#include "hdqkd/privacy.hpp"
#include "hdqkd/protocol.hpp"

namespace hdqkd {

inline const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::NoClick: return "none";
    case OutcomeKind::Click: return "click";
    case OutcomeKind::MultiClick: return "multi";
  }
  return "?";
}

// Schema: pulse_index,sent_basis,sent_symbol,recv_basis,outcome,detector
inline void write_events_csv(std::ostream& os, const std::vector<DetectionEvent>& events) {
  os << "pulse_index,sent_basis,sent_symbol,recv_basis,outcome,detector\n";
  for (const auto& ev : events) {
    os << ev.pulse_index << ',' << basis_name(ev.sent_basis) << ',' << ev.sent_symbol << ','
       << basis_name(ev.recv_basis) << ',' << outcome_name(ev.kind) << ',';
    if (ev.kind == OutcomeKind::Click) os << ev.detector;
    os << '\n';
  }
}

inline std::vector<DetectionEvent> read_events_csv(std::istream& is) {
  std::vector<DetectionEvent> events;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty events file");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    DetectionEvent ev;
    std::getline(row, field, ',');
    ev.pulse_index = std::stoull(field);
    std::getline(row, field, ',');
    ev.sent_basis = field == "ANG" ? Basis::ANG : Basis::OAM;
    std::getline(row, field, ',');
    ev.sent_symbol = std::stoi(field);
    std::getline(row, field, ',');
    ev.recv_basis = field == "ANG" ? Basis::ANG : Basis::OAM;
    std::getline(row, field, ',');
    ev.kind = field == "click" ? OutcomeKind::Click
              : field == "multi" ? OutcomeKind::MultiClick
                                 : OutcomeKind::NoClick;
    if (std::getline(row, field, ',') && !field.empty()) ev.detector = std::stoi(field);
    events.push_back(ev);
  }
  return events;
}

inline void write_symbols(const std::string& path, const std::vector<int>& symbols) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int s : symbols) out << s << '\n';
}

inline std::vector<int> read_symbols(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<int> symbols;
  int s;
  while (in >> s) symbols.push_back(s);
  return symbols;
}

inline void write_bits(const std::string& path, const BitString& bits) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::uint8_t b : bits) out << (b ? '1' : '0');
  out << '\n';
}

inline BitString read_bits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  BitString bits;
  char c;
  while (in.get(c)) {
    if (c == '0') bits.push_back(0);
    else if (c == '1') bits.push_back(1);
    else if (c != '\n' && c != '\r' && c != ' ')
      throw std::runtime_error("non-bit character in " + path);
  }
  return bits;
}

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string hex_digest(const std::vector<std::uint8_t>& bytes) {
  static const char* hexdig = "0123456789abcdef";
  const std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[15 - i] = hexdig[(h >> (4 * i)) & 0xf];
  return out;
}

}  // namespace hdqkd
