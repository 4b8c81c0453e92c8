#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace osa {

// Each channel carries two independent two-state Markov chains: one for
// occupancy (0 = busy, 1 = idle) and one for link quality (0 = bad,
// 1 = good). Matrices are row-stochastic with rows indexed by the current
// state and columns by the next state: occupancy(from, to).
struct ChannelParams {
  Eigen::Matrix2d occupancy;
  Eigen::Matrix2d quality;
};

// Units delivered per slot when transmitting on an idle channel, by quality.
struct RateParams {
  int good = 0;
  int bad = 0;
};

// Explicit per-channel bit vectors, entry m-1 for channel m (1 = idle/good).
struct ChannelStateVector {
  std::vector<std::uint8_t> occupancy;
  std::vector<std::uint8_t> quality;
};

struct ValidationIssue {
  std::string where;
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

// Checks entries in [0,1] and row sums equal to 1 within 1e-12 for every
// matrix of every channel. Issues name the channel, matrix, and row.
ValidationReport validate_channel_params(const std::vector<ChannelParams>& channels);

// Single-chain step probabilities; m is 1-based, bits are 0 or 1.
double occupancy_step_prob(const std::vector<ChannelParams>& channels, int m, int o_from,
                           int o_to);
double quality_step_prob(const std::vector<ChannelParams>& channels, int m, int q_from,
                         int q_to);

// Probability that the full occupancy/quality vector `from` evolves to `to`
// in one slot: the product of the per-chain step probabilities.
double joint_step_prob(const std::vector<ChannelParams>& channels, const ChannelStateVector& from,
                       const ChannelStateVector& to);

// Mask packing: bit m-1 of the mask carries channel m.
unsigned pack_bits(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> unpack_bits(unsigned mask, int M);

// Joint channel index over occupancy and quality masks: o_mask * 2^M + q_mask,
// enumerating all 4^M combined channel states.
inline long joint_index(unsigned o_mask, unsigned q_mask, int M) {
  return static_cast<long>(o_mask) * (1L << M) + static_cast<long>(q_mask);
}
inline unsigned joint_o_mask(long joint, int M) {
  return static_cast<unsigned>(joint >> M);
}
inline unsigned joint_q_mask(long joint, int M) {
  return static_cast<unsigned>(joint & ((1L << M) - 1));
}

double joint_step_prob_masks(const std::vector<ChannelParams>& channels, unsigned o_from,
                             unsigned q_from, unsigned o_to, unsigned q_to);

// Dense K x K one-slot kernel over joint indices, K = 4^M; kernel(from, to).
// Entries are built from the same per-chain doubles as joint_step_prob, so
// sums over rows agree bitwise with explicit successor enumeration.
Eigen::MatrixXd joint_kernel(const std::vector<ChannelParams>& channels);

// Samples one slot of channel evolution. Draw order is fixed: channel 1
// occupancy, channel 1 quality, channel 2 occupancy, ... Each next bit is 1
// iff the uniform draw is < P(to = 1 | from), so frozen chains (identity
// matrices) reproduce the input exactly.
ChannelStateVector sample_joint_step(const std::vector<ChannelParams>& channels,
                                     const ChannelStateVector& from, std::mt19937_64& rng);

}  // namespace osa
