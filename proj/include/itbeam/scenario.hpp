#pragma once

#include "itbeam/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace itbeam {

/// Scenario file could not be parsed or is inconsistent. `where` names the
/// line or field that caused it.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Portable source of CN(0,1) samples: mt19937_64 (fully specified by the
/// C++ standard) feeding a hand-written Box-Muller transform, so a seed
/// reproduces the same channels on every platform.
class ChannelRng {
 public:
  static constexpr const char* kName = "mt19937_64+box-muller";

  explicit ChannelRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// One circularly-symmetric complex Gaussian with unit variance. Each call
  /// consumes exactly two engine outputs; the real part comes first.
  std::complex<double> cn01();

 private:
  std::mt19937_64 engine_;
};

struct ScenarioSpec {
  std::vector<int> antennas;
  std::vector<double> power;
  std::vector<double> noise;
  // Exactly one of the two channel sources is set.
  std::optional<std::vector<cvec>> explicit_channels;  // row-major (from, to)
  std::optional<std::uint64_t> seed;
  std::string distribution = "cn01";
};

/// Draws channels in lexicographic (from, to) order, antenna by antenna.
NetworkInstance generate_network(std::vector<int> antennas,
                                 std::vector<double> power,
                                 std::vector<double> noise, std::uint64_t seed);

NetworkInstance build_network(const ScenarioSpec& spec);
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec read_scenario_file(const std::string& path);
NetworkInstance load_scenario(const std::string& path);

}  // namespace itbeam
