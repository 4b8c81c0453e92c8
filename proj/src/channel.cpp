#include "osa/channel.hpp"

#include "osa/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace osa {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_matrix(const Eigen::Matrix2d& m, const std::string& where,
                  std::vector<ValidationIssue>& issues) {
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) {
      double p = m(r, col);
      if (!(p >= 0.0 && p <= 1.0) || std::isnan(p)) {
        std::ostringstream what;
        what << "entry (" << r << "," << col << ") = " << p << " outside [0,1]";
        issues.push_back({where, what.str()});
      }
    }
    double sum = m(r, 0) + m(r, 1);
    if (std::abs(sum - 1.0) > kRowSumTol) {
      std::ostringstream what;
      what << "row " << r << " sums to " << sum << ", expected 1";
      issues.push_back({where, what.str()});
    }
  }
}

const ChannelParams& channel_at(const std::vector<ChannelParams>& channels, int m) {
  if (m < 1 || m > static_cast<int>(channels.size())) {
    throw std::out_of_range("channel index " + std::to_string(m) + " outside 1.." +
                            std::to_string(channels.size()));
  }
  return channels[static_cast<size_t>(m - 1)];
}

int require_bit(int b, const char* what) {
  if (b != 0 && b != 1) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1, got " + std::to_string(b));
  }
  return b;
}

}  // namespace

std::string ValidationReport::summary() const {
  if (issues.empty()) return "ok";
  std::ostringstream out;
  out << issues.size() << " issue(s):";
  for (const auto& issue : issues) out << "\n  " << issue.where << ": " << issue.what;
  return out.str();
}

ValidationReport validate_channel_params(const std::vector<ChannelParams>& channels) {
  ValidationReport report;
  for (size_t i = 0; i < channels.size(); ++i) {
    std::string base = "channel " + std::to_string(i + 1);
    check_matrix(channels[i].occupancy, base + " occupancy", report.issues);
    check_matrix(channels[i].quality, base + " quality", report.issues);
  }
  return report;
}

double occupancy_step_prob(const std::vector<ChannelParams>& channels, int m, int o_from,
                           int o_to) {
  require_bit(o_from, "o_from");
  require_bit(o_to, "o_to");
  return channel_at(channels, m).occupancy(o_from, o_to);
}

double quality_step_prob(const std::vector<ChannelParams>& channels, int m, int q_from,
                         int q_to) {
  require_bit(q_from, "q_from");
  require_bit(q_to, "q_to");
  return channel_at(channels, m).quality(q_from, q_to);
}

double joint_step_prob(const std::vector<ChannelParams>& channels, const ChannelStateVector& from,
                       const ChannelStateVector& to) {
  size_t M = channels.size();
  if (from.occupancy.size() != M || from.quality.size() != M || to.occupancy.size() != M ||
      to.quality.size() != M) {
    throw std::invalid_argument("state vector length does not match channel count");
  }
  double p = 1.0;
  for (size_t i = 0; i < M; ++i) {
    p *= channels[i].occupancy(require_bit(from.occupancy[i], "occupancy bit"),
                               require_bit(to.occupancy[i], "occupancy bit"));
    p *= channels[i].quality(require_bit(from.quality[i], "quality bit"),
                             require_bit(to.quality[i], "quality bit"));
  }
  return p;
}

unsigned pack_bits(const std::vector<std::uint8_t>& bits) {
  unsigned mask = 0;
  for (size_t i = 0; i < bits.size(); ++i) {
    require_bit(bits[i], "bit");
    if (bits[i]) mask |= 1u << i;
  }
  return mask;
}

std::vector<std::uint8_t> unpack_bits(unsigned mask, int M) {
  std::vector<std::uint8_t> bits(static_cast<size_t>(M));
  for (int m = 0; m < M; ++m) bits[static_cast<size_t>(m)] = (mask >> m) & 1u;
  return bits;
}

double joint_step_prob_masks(const std::vector<ChannelParams>& channels, unsigned o_from,
                             unsigned q_from, unsigned o_to, unsigned q_to) {
  double p = 1.0;
  for (size_t i = 0; i < channels.size(); ++i) {
    p *= channels[i].occupancy((o_from >> i) & 1u, (o_to >> i) & 1u);
    p *= channels[i].quality((q_from >> i) & 1u, (q_to >> i) & 1u);
  }
  return p;
}

Eigen::MatrixXd joint_kernel(const std::vector<ChannelParams>& channels) {
  int M = static_cast<int>(channels.size());
  long K = 1L << (2 * M);
  long half = 1L << M;
  Eigen::MatrixXd kernel(K, K);
  for (long from = 0; from < K; ++from) {
    unsigned o_from = static_cast<unsigned>(from / half);
    unsigned q_from = static_cast<unsigned>(from % half);
    for (long to = 0; to < K; ++to) {
      unsigned o_to = static_cast<unsigned>(to / half);
      unsigned q_to = static_cast<unsigned>(to % half);
      kernel(from, to) = joint_step_prob_masks(channels, o_from, q_from, o_to, q_to);
    }
  }
  return kernel;
}

ChannelStateVector sample_joint_step(const std::vector<ChannelParams>& channels,
                                     const ChannelStateVector& from, std::mt19937_64& rng) {
  size_t M = channels.size();
  if (from.occupancy.size() != M || from.quality.size() != M) {
    throw std::invalid_argument("state vector length does not match channel count");
  }
  ChannelStateVector to;
  to.occupancy.resize(M);
  to.quality.resize(M);
  for (size_t i = 0; i < M; ++i) {
    double p_idle = channels[i].occupancy(require_bit(from.occupancy[i], "occupancy bit"), 1);
    to.occupancy[i] = uniform01(rng) < p_idle ? 1 : 0;
    double p_good = channels[i].quality(require_bit(from.quality[i], "quality bit"), 1);
    to.quality[i] = uniform01(rng) < p_good ? 1 : 0;
  }
  return to;
}

}  // namespace osa
