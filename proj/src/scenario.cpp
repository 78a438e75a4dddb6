#include "itbeam/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace itbeam {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925;

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ScenarioError("missing field '" + where + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ScenarioError("field '" + where + "' must be a number");
  return v.get<double>();
}

template <typename T>
std::vector<T> number_list(const json& v, std::size_t expected,
                           const std::string& where) {
  if (!v.is_array())
    throw ScenarioError("field '" + where + "' must be a list");
  if (v.size() != expected)
    throw ScenarioError("field '" + where + "' must have " +
                        std::to_string(expected) + " entries, found " +
                        std::to_string(v.size()));
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if constexpr (std::is_integral_v<T>) {
      if (!v[i].is_number_integer())
        throw ScenarioError("field '" + at + "' must be an integer");
      out.push_back(v[i].get<T>());
    } else {
      out.push_back(static_cast<T>(number(v[i], at)));
    }
  }
  return out;
}

std::size_t cell_index(const json& v, std::size_t cells, const std::string& where) {
  if (!v.is_number_integer())
    throw ScenarioError("field '" + where + "' must be an integer");
  const auto idx = v.get<long long>();
  if (idx < 1 || static_cast<std::size_t>(idx) > cells)
    throw ScenarioError("field '" + where + "' must be a cell number in 1.." +
                        std::to_string(cells));
  return static_cast<std::size_t>(idx - 1);
}

}  // namespace

double ChannelRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::complex<double> ChannelRng::cn01() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));  // sqrt(-2 ln u1) * sqrt(1/2)
  return {radius * std::cos(kTwoPi * u2), radius * std::sin(kTwoPi * u2)};
}

NetworkInstance generate_network(std::vector<int> antennas,
                                 std::vector<double> power,
                                 std::vector<double> noise, std::uint64_t seed) {
  ChannelRng rng(seed);
  const std::size_t k_cells = antennas.size();
  std::vector<cvec> channels;
  channels.reserve(k_cells * k_cells);
  for (std::size_t j = 0; j < k_cells; ++j)
    for (std::size_t k = 0; k < k_cells; ++k) {
      if (antennas[j] <= 0)
        throw std::invalid_argument("antenna counts must be positive");
      cvec h(antennas[j]);
      for (int m = 0; m < antennas[j]; ++m) h(m) = rng.cn01();
      channels.push_back(std::move(h));
    }
  return NetworkInstance(std::move(antennas), std::move(power), std::move(noise),
                         std::move(channels));
}

NetworkInstance build_network(const ScenarioSpec& spec) {
  if (spec.explicit_channels.has_value() == spec.seed.has_value())
    throw ScenarioError("exactly one of explicit channels or a seed is required");
  try {
    if (spec.seed) {
      if (spec.distribution != "cn01")
        throw ScenarioError("unknown channel distribution '" + spec.distribution + "'");
      return generate_network(spec.antennas, spec.power, spec.noise, *spec.seed);
    }
    return NetworkInstance(spec.antennas, spec.power, spec.noise,
                           *spec.explicit_channels);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
}

ScenarioSpec parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("parse error at " + line_col(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");

  ScenarioSpec spec;
  const json& k_field = field(doc, "K", "");
  if (!k_field.is_number_integer() || k_field.get<long long>() < 1)
    throw ScenarioError("field 'K' must be a positive integer");
  const auto cells = static_cast<std::size_t>(k_field.get<long long>());

  spec.antennas = number_list<int>(field(doc, "antennas", ""), cells, "antennas");
  spec.power = number_list<double>(field(doc, "power", ""), cells, "power");
  spec.noise = number_list<double>(field(doc, "noise", ""), cells, "noise");
  for (std::size_t k = 0; k < cells; ++k) {
    if (spec.antennas[k] <= 0)
      throw ScenarioError("field 'antennas[" + std::to_string(k) + "]' must be positive");
    if (!(spec.power[k] > 0.0))
      throw ScenarioError("field 'power[" + std::to_string(k) + "]' must be positive");
    if (!(spec.noise[k] > 0.0))
      throw ScenarioError("field 'noise[" + std::to_string(k) + "]' must be positive");
  }

  const json& ch = field(doc, "channels", "");
  if (!ch.is_object()) throw ScenarioError("field 'channels' must be an object");
  const bool has_explicit = ch.contains("explicit");
  const bool has_seed = ch.contains("seed");
  if (has_explicit == has_seed)
    throw ScenarioError(
        "field 'channels' needs exactly one of 'explicit' or 'seed'");

  if (has_seed) {
    const json& s = ch.at("seed");
    if (!s.is_number_unsigned())
      throw ScenarioError("field 'channels.seed' must be an unsigned integer");
    spec.seed = s.get<std::uint64_t>();
    if (ch.contains("distribution")) {
      if (!ch.at("distribution").is_string())
        throw ScenarioError("field 'channels.distribution' must be a string");
      spec.distribution = ch.at("distribution").get<std::string>();
    }
    if (spec.distribution != "cn01")
      throw ScenarioError("unknown channel distribution '" + spec.distribution + "'");
    return spec;
  }

  const json& list = ch.at("explicit");
  if (!list.is_array())
    throw ScenarioError("field 'channels.explicit' must be a list");
  std::vector<cvec> channels(cells * cells);
  std::vector<bool> seen(cells * cells, false);
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string where = "channels.explicit[" + std::to_string(e) + "]";
    const json& entry = list[e];
    const std::size_t from = cell_index(field(entry, "from", where + "."), cells, where + ".from");
    const std::size_t to = cell_index(field(entry, "to", where + "."), cells, where + ".to");
    const json& h = field(entry, "h", where + ".");
    const std::size_t m = static_cast<std::size_t>(spec.antennas[from]);
    if (!h.is_array() || h.size() != m)
      throw ScenarioError("field '" + where + ".h' must list M_" +
                          std::to_string(from + 1) + " = " + std::to_string(m) +
                          " [re, im] pairs");
    cvec v(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const std::string at = where + ".h[" + std::to_string(i) + "]";
      if (!h[i].is_array() || h[i].size() != 2)
        throw ScenarioError("field '" + at + "' must be an [re, im] pair");
      v(static_cast<Eigen::Index>(i)) = {number(h[i][0], at + "[0]"),
                                         number(h[i][1], at + "[1]")};
    }
    const std::size_t slot = from * cells + to;
    if (seen[slot])
      throw ScenarioError("channel (" + std::to_string(from + 1) + "," +
                          std::to_string(to + 1) + ") given twice");
    seen[slot] = true;
    channels[slot] = std::move(v);
  }
  for (std::size_t slot = 0; slot < seen.size(); ++slot)
    if (!seen[slot])
      throw ScenarioError("channel (" + std::to_string(slot / cells + 1) + "," +
                          std::to_string(slot % cells + 1) + ") missing");
  spec.explicit_channels = std::move(channels);
  return spec;
}

ScenarioSpec read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

NetworkInstance load_scenario(const std::string& path) {
  return build_network(read_scenario_file(path));
}

}  // namespace itbeam
