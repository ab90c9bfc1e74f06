/*
 * Copyright 2026 The stripesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stripesim/config.hpp"
#include "stripesim/errors.hpp"

namespace stripesim {

/// Processing scheme selector, shared by estimation, detection and the load
/// accounting. Genie has no fronthaul protocol.
enum class Method { NoSuppression, Local, PhaseRotate, Gramian, Centralized, Genie };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::NoSuppression: return "nosuppression";
    case Method::Local: return "local";
    case Method::PhaseRotate: return "phaserotate";
    case Method::Gramian: return "gramian";
    case Method::Centralized: return "centralized";
    case Method::Genie: return "genie";
  }
  return "?";
}

// --------------------------------------------------------------------------
// Message kinds. A "real symbol" is one real scalar on the wire; a complex
// value counts as two. Hermitian matrices travel packed: M diagonal reals
// plus M(M-1) off-diagonal reals, M*M total.
// --------------------------------------------------------------------------

enum class MessageKind : std::uint8_t {
  ResidualBlock = 1,   // one AP's despread residual, N x (tau_p - K)
  GramianPartial = 2,  // accumulated Hermitian Gramian, (tau_p - K)^2 reals
  SignalEstimate = 3,  // interferer signal estimate, complex vector
  RlsStatePacket = 4,  // sequential-LS state: estimate + Hermitian covariance
  PayloadForward = 5,  // one AP's received payload vector and channel columns
};

struct ResidualBlock {
  Eigen::MatrixXcd block;
  std::size_t real_symbol_count() const { return 2 * block.rows() * block.cols(); }
};

struct GramianPartial {
  Eigen::MatrixXcd gramian;  // Hermitian
  std::size_t real_symbol_count() const { return gramian.rows() * gramian.rows(); }
};

struct SignalEstimate {
  Eigen::VectorXcd estimate;
  std::size_t real_symbol_count() const { return 2 * estimate.size(); }
};

struct RlsStatePacket {
  Eigen::VectorXcd estimate;
  Eigen::MatrixXcd q;  // Hermitian
  std::size_t real_symbol_count() const {
    return 2 * estimate.size() + q.rows() * q.rows();
  }
};

struct PayloadForward {
  Eigen::VectorXcd received;
  Eigen::MatrixXcd augmented;
  std::size_t real_symbol_count() const {
    return 2 * received.size() + 2 * augmented.rows() * augmented.cols();
  }
};

using MessagePayload =
    std::variant<ResidualBlock, GramianPartial, SignalEstimate, RlsStatePacket, PayloadForward>;

struct FronthaulMessage {
  std::uint16_t link = 0;  // 1-based; link L is AP L -> CPU
  MessagePayload payload;

  MessageKind kind() const {
    return static_cast<MessageKind>(static_cast<std::uint8_t>(payload.index()) + 1);
  }
  std::size_t real_symbol_count() const {
    return std::visit([](const auto& p) { return p.real_symbol_count(); }, payload);
  }
};

// --------------------------------------------------------------------------
// Ledger
// --------------------------------------------------------------------------

struct LinkCounters {
  long long pilot_phase = 0;
  long long payload_phase = 0;
  // CPU -> AP return pass (the signal-estimate broadcast). Accounted apart
  // from the forward counters that the per-link load table describes.
  long long broadcast = 0;
};

/// Per-link real-symbol counters for one trial. Entry l-1 is the link leaving
/// AP l (the last one terminates at the CPU).
struct FronthaulLedger {
  explicit FronthaulLedger(int num_links = 0) : per_link(num_links) {}
  std::vector<LinkCounters> per_link;

  long long total() const {
    long long t = 0;
    for (const auto& c : per_link) t += c.pilot_phase + c.payload_phase + c.broadcast;
    return t;
  }
};

enum class Phase { Pilot, Payload };

inline Phase phase_of(MessageKind kind) {
  switch (kind) {
    case MessageKind::ResidualBlock:
    case MessageKind::GramianPartial:
    case MessageKind::SignalEstimate: return Phase::Pilot;
    case MessageKind::RlsStatePacket:
    case MessageKind::PayloadForward: return Phase::Payload;
  }
  throw std::invalid_argument("phase_of: unknown message kind");
}

/// Charges a forward-pass message to its link. The phase follows the kind.
inline void charge(FronthaulLedger& ledger, int link_index, const FronthaulMessage& msg) {
  if (link_index < 1 || link_index > static_cast<int>(ledger.per_link.size()))
    throw std::invalid_argument("charge: link index " + std::to_string(link_index) +
                                " out of range");
  auto& counters = ledger.per_link[link_index - 1];
  const auto count = static_cast<long long>(msg.real_symbol_count());
  if (phase_of(msg.kind()) == Phase::Pilot)
    counters.pilot_phase += count;
  else
    counters.payload_phase += count;
}

/// Charges the CPU -> AP return pass (kept out of the forward counters).
inline void charge_broadcast(FronthaulLedger& ledger, int link_index,
                             const FronthaulMessage& msg) {
  if (link_index < 1 || link_index > static_cast<int>(ledger.per_link.size()))
    throw std::invalid_argument("charge_broadcast: link index out of range");
  ledger.per_link[link_index - 1].broadcast += static_cast<long long>(msg.real_symbol_count());
}

// --------------------------------------------------------------------------
// Closed-form per-link loads. Pilot-phase counts are per coherence block;
// payload counts are per symbol period.
// --------------------------------------------------------------------------

enum class GramianVariant { Reduced, Unreduced };

/// Expected real symbols on link l (1-based vector index l-1).
///
/// Pilot phase:  centralized accumulate-and-forward grows as 2N(tau_p-K)*l;
///               local processing sends nothing; Gramian accumulation costs
///               (tau_p-K)^2 per link; phase-rotate-and-average 2(tau_p-K).
/// Payload:      the sequential-LS state costs 2(K+1) + (K+1)^2 per link
///               (2K + K^2 without the fictitious user); centralized payload
///               forwarding grows as (2N + 2N(K+1))*l.
///
/// The Unreduced variant documents the cost of forwarding the full tau_p^2
/// Gramian instead of the despread one; nothing in the simulator sends it.
inline std::vector<long long> expected_load(Method method, Phase phase, const SystemConfig& cfg,
                                            GramianVariant variant = GramianVariant::Reduced) {
  const long long num_links = cfg.num_aps;
  const long long n = cfg.antennas_per_ap;
  const long long k = cfg.num_ues;
  const long long m = cfg.pilot_len - cfg.num_ues;  // residual dimension
  std::vector<long long> loads(num_links, 0);

  if (phase == Phase::Pilot) {
    switch (method) {
      case Method::Centralized:
        for (long long l = 1; l <= num_links; ++l) loads[l - 1] = 2 * n * m * l;
        break;
      case Method::NoSuppression:
      case Method::Local:
        break;  // zero
      case Method::Gramian: {
        const long long per_link =
            (variant == GramianVariant::Reduced) ? m * m
                                                 : static_cast<long long>(cfg.pilot_len) * cfg.pilot_len;
        for (auto& v : loads) v = per_link;
        break;
      }
      case Method::PhaseRotate:
        for (auto& v : loads) v = 2 * m;
        break;
      case Method::Genie:
        throw std::invalid_argument("expected_load: genie has no fronthaul protocol");
    }
    return loads;
  }

  switch (method) {
    case Method::Centralized:
      for (long long l = 1; l <= num_links; ++l) loads[l - 1] = (2 * n + 2 * n * (k + 1)) * l;
      break;
    case Method::NoSuppression:
      for (auto& v : loads) v = 2 * k + k * k;
      break;
    case Method::Local:
    case Method::Gramian:
    case Method::PhaseRotate:
      for (auto& v : loads) v = 2 * (k + 1) + (k + 1) * (k + 1);
      break;
    case Method::Genie:
      throw std::invalid_argument("expected_load: genie has no fronthaul protocol");
  }
  return loads;
}

// --------------------------------------------------------------------------
// Wire format. Little-endian throughout: kind tag (1 byte), link index
// (2-byte unsigned), per-kind dimensions (2-byte unsigned each), then the
// payload as 8-byte IEEE-754 reals, no padding. Hermitian matrices are packed
// as the real diagonal followed by the strict upper triangle (row-major,
// re/im pairs): M + M(M-1) = M^2 reals.
// --------------------------------------------------------------------------

namespace wire {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct Reader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > size) throw ParseError("truncated stream: expected byte", pos);
    return data[pos++];
  }
  std::uint16_t u16() {
    if (pos + 2 > size) throw ParseError("truncated stream: expected u16", pos);
    const std::uint16_t v = static_cast<std::uint16_t>(data[pos]) |
                            static_cast<std::uint16_t>(data[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  double f64() {
    if (pos + 8 > size) throw ParseError("truncated stream: expected real", pos);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(bits);
  }
  void done() const {
    if (pos != size) throw ParseError("trailing bytes after message", pos);
  }
};

inline void put_complex_matrix(std::vector<std::uint8_t>& out, const Eigen::MatrixXcd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_f64(out, m(r, c).real());
      put_f64(out, m(r, c).imag());
    }
}

inline Eigen::MatrixXcd get_complex_matrix(Reader& rd, int rows, int cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double re = rd.f64();
      const double im = rd.f64();
      m(r, c) = {re, im};
    }
  return m;
}

inline void put_hermitian(std::vector<std::uint8_t>& out, const Eigen::MatrixXcd& m) {
  const auto n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) put_f64(out, m(i, i).real());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
}

inline Eigen::MatrixXcd get_hermitian(Reader& rd, int n) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = {rd.f64(), 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double re = rd.f64();
      const double im = rd.f64();
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  return m;
}

}  // namespace wire

inline std::vector<std::uint8_t> serialize(const FronthaulMessage& msg) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(msg.kind()));
  wire::put_u16(out, msg.link);
  std::visit(
      [&out](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResidualBlock>) {
          wire::put_u16(out, static_cast<std::uint16_t>(p.block.rows()));
          wire::put_u16(out, static_cast<std::uint16_t>(p.block.cols()));
          wire::put_complex_matrix(out, p.block);
        } else if constexpr (std::is_same_v<T, GramianPartial>) {
          wire::put_u16(out, static_cast<std::uint16_t>(p.gramian.rows()));
          wire::put_hermitian(out, p.gramian);
        } else if constexpr (std::is_same_v<T, SignalEstimate>) {
          wire::put_u16(out, static_cast<std::uint16_t>(p.estimate.size()));
          wire::put_complex_matrix(out, p.estimate);
        } else if constexpr (std::is_same_v<T, RlsStatePacket>) {
          wire::put_u16(out, static_cast<std::uint16_t>(p.estimate.size()));
          wire::put_complex_matrix(out, p.estimate);
          wire::put_hermitian(out, p.q);
        } else if constexpr (std::is_same_v<T, PayloadForward>) {
          wire::put_u16(out, static_cast<std::uint16_t>(p.received.size()));
          wire::put_u16(out, static_cast<std::uint16_t>(p.augmented.cols()));
          wire::put_complex_matrix(out, p.received);
          wire::put_complex_matrix(out, p.augmented);
        }
      },
      msg.payload);
  return out;
}

inline FronthaulMessage deserialize(const std::uint8_t* data, std::size_t size) {
  wire::Reader rd{data, size};
  const std::uint8_t kind = rd.u8();
  FronthaulMessage msg;
  msg.link = rd.u16();
  switch (static_cast<MessageKind>(kind)) {
    case MessageKind::ResidualBlock: {
      const int rows = rd.u16();
      const int cols = rd.u16();
      msg.payload = ResidualBlock{wire::get_complex_matrix(rd, rows, cols)};
      break;
    }
    case MessageKind::GramianPartial: {
      const int n = rd.u16();
      msg.payload = GramianPartial{wire::get_hermitian(rd, n)};
      break;
    }
    case MessageKind::SignalEstimate: {
      const int n = rd.u16();
      msg.payload = SignalEstimate{wire::get_complex_matrix(rd, n, 1)};
      break;
    }
    case MessageKind::RlsStatePacket: {
      const int d = rd.u16();
      Eigen::VectorXcd est = wire::get_complex_matrix(rd, d, 1);
      Eigen::MatrixXcd q = wire::get_hermitian(rd, d);
      msg.payload = RlsStatePacket{std::move(est), std::move(q)};
      break;
    }
    case MessageKind::PayloadForward: {
      const int n = rd.u16();
      const int cols = rd.u16();
      Eigen::VectorXcd y = wire::get_complex_matrix(rd, n, 1);
      Eigen::MatrixXcd aug = wire::get_complex_matrix(rd, n, cols);
      msg.payload = PayloadForward{std::move(y), std::move(aug)};
      break;
    }
    default:
      throw ParseError("unknown message kind " + std::to_string(kind), 0);
  }
  rd.done();
  return msg;
}

inline FronthaulMessage deserialize(const std::vector<std::uint8_t>& bytes) {
  return deserialize(bytes.data(), bytes.size());
}

}  // namespace stripesim
