#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fairprice {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Estimated and true price sensitivities are kept at or below -kAlphaGuard.
inline constexpr double kAlphaGuard = 1e-2;

enum class Group : int { Zero = 0, One = 1 };

inline constexpr int index_of(Group g) { return static_cast<int>(g); }
inline Group group_from_int(int g)
{
  if (g != 0 && g != 1) throw std::invalid_argument("group must be 0 or 1, got " + std::to_string(g));
  return static_cast<Group>(g);
}

/// Invalid model or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares design is rank deficient or too ill-conditioned to trust.
class SingularFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Independent random streams of one replication. Keeping them apart lets two
/// behaviors share group, feature, noise and exploration draws.
enum class Stream : std::uint32_t {
  Group = 1,
  Feature = 2,
  Noise = 3,
  ExplorationPrice = 4,
  Oracle = 5,
  Misc = 6,
};

inline Rng make_stream(std::uint64_t seed, Stream stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedf00du};
  return Rng(seq);
}

}  // namespace fairprice
