#include "longswap/mortality.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "longswap/errors.hpp"
#include "longswap/parallel.hpp"
#include "longswap/rng.hpp"

namespace longswap {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'W', 'P'};
constexpr std::uint16_t kFormatVersion = 1;

static_assert(std::numeric_limits<double>::is_iec559,
              "scenario files require IEEE 754 doubles");

void append_bytes(std::string& out, const void* data, std::size_t size) {
  out.append(static_cast<const char*>(data), size);
}

void append_u16(std::string& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8)};
  append_bytes(out, b, 2);
}

void append_u32(std::string& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  append_bytes(out, b, 4);
}

void append_u64(std::string& out, std::uint64_t v) {
  append_u32(out, static_cast<std::uint32_t>(v));
  append_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void append_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  append_u64(out, bits);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t read_u64(const unsigned char* p) {
  return static_cast<std::uint64_t>(read_u32(p)) |
         (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
}

double read_f64(const unsigned char* p) {
  const std::uint64_t bits = read_u64(p);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::vector<double> read_age_keyed_array(const nlohmann::json& node,
                                         const char* name, int age_min,
                                         int age_max) {
  if (!node.contains(name) || !node[name].is_object()) {
    throw validation_error(std::string("parameter file: missing per-age object '") +
                           name + "'");
  }
  const auto& obj = node[name];
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(age_max - age_min + 1));
  for (int age = age_min; age <= age_max; ++age) {
    const std::string key = std::to_string(age);
    if (!obj.contains(key)) {
      throw validation_error(std::string("parameter file: '") + name +
                             "' lacks age " + key);
    }
    values.push_back(obj[key].get<double>());
  }
  if (obj.size() != values.size()) {
    throw validation_error(std::string("parameter file: '") + name +
                           "' has entries outside the age range");
  }
  return values;
}

double require_number(const nlohmann::json& node, const char* name) {
  if (!node.contains(name) || !node[name].is_number()) {
    throw validation_error(std::string("parameter file: missing number '") +
                           name + "'");
  }
  return node[name].get<double>();
}

}  // namespace

void ApciParameters::validate() const {
  if (age_min > age_max) {
    throw validation_error("mortality parameters: empty age range");
  }
  const auto expected = static_cast<std::size_t>(age_count());
  if (beta1.size() != expected || beta2.size() != expected ||
      sigma_omega.size() != expected) {
    throw validation_error(
        "mortality parameters: per-age arrays must span the age range exactly");
  }
  for (double v : beta1) {
    if (!std::isfinite(v)) {
      throw validation_error("mortality parameters: beta1 must be finite");
    }
  }
  for (double v : beta2) {
    if (!std::isfinite(v)) {
      throw validation_error("mortality parameters: beta2 must be finite");
    }
  }
  for (double v : sigma_omega) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw validation_error(
          "mortality parameters: sigma_omega must be non-negative");
    }
  }
  if (!(sigma_kappa >= 0.0) || !std::isfinite(sigma_kappa)) {
    throw validation_error(
        "mortality parameters: sigma_kappa must be non-negative");
  }
  if (!std::isfinite(kappa_last) || !std::isfinite(theta) ||
      !std::isfinite(h_bar)) {
    throw validation_error("mortality parameters: scalar fields must be finite");
  }
  if (h_bar > static_cast<double>(base_year)) {
    throw validation_error(
        "mortality parameters: trend centering year is past the fitted span");
  }
}

ApciParameters load_apci_parameters(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw io_error("cannot open parameter file: " + file.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw io_error("cannot parse parameter file " + file.string() + ": " +
                   e.what());
  }
  if (!doc.contains("age_range") || !doc["age_range"].is_array() ||
      doc["age_range"].size() != 2) {
    throw validation_error(
        "parameter file: 'age_range' must be a two-element array");
  }
  ApciParameters params;
  params.age_min = doc["age_range"][0].get<int>();
  params.age_max = doc["age_range"][1].get<int>();
  if (params.age_min > params.age_max) {
    throw validation_error("parameter file: age_range is empty");
  }
  params.beta1 = read_age_keyed_array(doc, "beta1", params.age_min, params.age_max);
  params.beta2 = read_age_keyed_array(doc, "beta2", params.age_min, params.age_max);
  params.sigma_omega =
      read_age_keyed_array(doc, "sigma_omega", params.age_min, params.age_max);
  params.kappa_last = require_number(doc, "kappa_last");
  params.sigma_kappa = require_number(doc, "sigma_kappa");
  params.theta = require_number(doc, "theta");
  params.h_bar = require_number(doc, "h_bar");
  params.base_year = static_cast<int>(require_number(doc, "base_year"));
  params.validate();
  return params;
}

void save_apci_parameters(const ApciParameters& params,
                          const std::filesystem::path& file) {
  params.validate();
  nlohmann::json doc;
  doc["age_range"] = {params.age_min, params.age_max};
  nlohmann::json b1, b2, so;
  for (int age = params.age_min; age <= params.age_max; ++age) {
    const std::string key = std::to_string(age);
    const auto i = static_cast<std::size_t>(age - params.age_min);
    b1[key] = params.beta1[i];
    b2[key] = params.beta2[i];
    so[key] = params.sigma_omega[i];
  }
  doc["beta1"] = std::move(b1);
  doc["beta2"] = std::move(b2);
  doc["sigma_omega"] = std::move(so);
  doc["kappa_last"] = params.kappa_last;
  doc["sigma_kappa"] = params.sigma_kappa;
  doc["theta"] = params.theta;
  doc["h_bar"] = params.h_bar;
  doc["base_year"] = params.base_year;
  std::ofstream out(file);
  if (!out) {
    throw io_error("cannot write parameter file: " + file.string());
  }
  out << doc.dump(2) << '\n';
}

void MortalityScenarioSet::validate() const {
  if (horizon < 1) throw validation_error("scenario set: horizon must be >= 1");
  if (path_count < 1) {
    throw validation_error("scenario set: need at least one path");
  }
  if (initial_age < 0) {
    throw validation_error("scenario set: negative initial age");
  }
  const auto expected =
      path_count * static_cast<std::size_t>(horizon);
  if (survival.size() != expected) {
    throw validation_error("scenario set: storage does not match dimensions");
  }
  for (double q : survival) {
    if (!(q > 0.0) || q > 1.0) {
      throw validation_error(
          "scenario set: survival probabilities must lie in (0, 1]");
    }
  }
}

MortalityScenarioSet simulate_scenarios(const ApciParameters& params, int x,
                                        int T, std::size_t K,
                                        std::uint64_t seed, int threads) {
  params.validate();
  if (T < 1) throw validation_error("simulate_scenarios: horizon must be >= 1");
  if (K < 1) throw validation_error("simulate_scenarios: need at least one path");
  if (x < params.age_min) {
    throw validation_error("simulate_scenarios: cohort age below fitted range");
  }
  if (x + T > params.age_max + 1) {
    throw validation_error(
        "simulate_scenarios: projection runs past the fitted age range");
  }

  MortalityScenarioSet set;
  set.initial_age = x;
  set.horizon = T;
  set.path_count = K;
  set.seed = seed;
  set.survival.resize(K * static_cast<std::size_t>(T));

  const double floor_q = std::numeric_limits<double>::min();
  parallel_for(K, resolve_thread_count(threads), [&](std::size_t k) {
    CounterRng walk(seed, rng_stream::period_innovation, k);
    CounterRng noise(seed, rng_stream::cell_noise, k);
    double kappa = params.kappa_last;
    for (int t = 0; t < T; ++t) {
      kappa += params.sigma_kappa * walk.normal_at(static_cast<std::uint64_t>(t));
      const auto ai = static_cast<std::size_t>(x + t - params.age_min);
      // Projection year t covers calendar year base_year + t + 1.
      const double year_offset =
          static_cast<double>(params.base_year + t + 1) - params.h_bar;
      const double log_force =
          params.beta1[ai] + params.beta2[ai] * year_offset + kappa +
          params.theta +
          params.sigma_omega[ai] * noise.normal_at(static_cast<std::uint64_t>(t));
      const double q = std::exp(-std::exp(log_force));
      set.at(k, t) = q > floor_q ? q : floor_q;
    }
  });
  return set;
}

SurvivalCurve estimate_curve(const MortalityScenarioSet& scenarios) {
  scenarios.validate();
  const int T = scenarios.horizon;
  SurvivalCurve curve;
  curve.initial_age = scenarios.initial_age;
  curve.horizon = T;
  curve.multi_year.assign(static_cast<std::size_t>(T) + 1, 0.0);
  curve.one_year.assign(static_cast<std::size_t>(T) + 1, 0.0);
  curve.multi_year[0] = 1.0;
  curve.one_year[0] = 1.0;
  for (std::size_t k = 0; k < scenarios.path_count; ++k) {
    const double n = static_cast<double>(k + 1);
    double product = 1.0;
    for (int t = 1; t <= T; ++t) {
      const double q = scenarios.at(k, t - 1);
      product *= q;
      curve.multi_year[t] += (product - curve.multi_year[t]) / n;
      curve.one_year[t] += (q - curve.one_year[t]) / n;
    }
  }
  return curve;
}

void save_scenarios(const MortalityScenarioSet& scenarios,
                    const std::filesystem::path& file) {
  scenarios.validate();
  if (scenarios.initial_age > 0xFFFF) {
    throw validation_error("save_scenarios: initial age does not fit the format");
  }
  std::string buffer;
  buffer.reserve(24 + scenarios.survival.size() * 8);
  append_bytes(buffer, kMagic, 4);
  append_u16(buffer, kFormatVersion);
  append_u16(buffer, static_cast<std::uint16_t>(scenarios.initial_age));
  append_u32(buffer, static_cast<std::uint32_t>(scenarios.horizon));
  append_u32(buffer, static_cast<std::uint32_t>(scenarios.path_count));
  append_u64(buffer, scenarios.seed);
  for (double q : scenarios.survival) append_f64(buffer, q);

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + file.string());
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw io_error("short write: " + file.string());
}

MortalityScenarioSet load_scenarios(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw io_error("cannot open scenario file: " + file.string());
  std::string buffer((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
  if (buffer.size() < 24) {
    throw io_error("scenario file truncated before header: " + file.string());
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(buffer.data());
  if (std::memcmp(bytes, kMagic, 4) != 0) {
    throw io_error("not a scenario file (bad magic): " + file.string());
  }
  const std::uint16_t version = read_u16(bytes + 4);
  if (version != kFormatVersion) {
    throw io_error("unsupported scenario file version " +
                   std::to_string(version) + ": " + file.string());
  }
  MortalityScenarioSet set;
  set.initial_age = read_u16(bytes + 6);
  set.horizon = static_cast<int>(read_u32(bytes + 8));
  set.path_count = read_u32(bytes + 12);
  set.seed = read_u64(bytes + 16);
  if (set.horizon < 1 || set.path_count < 1) {
    throw io_error("scenario file header has empty dimensions: " +
                   file.string());
  }
  const std::size_t cells =
      set.path_count * static_cast<std::size_t>(set.horizon);
  if (buffer.size() != 24 + cells * 8) {
    throw io_error("scenario file payload does not match its dimensions: " +
                   file.string());
  }
  set.survival.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double q = read_f64(bytes + 24 + i * 8);
    if (!(q > 0.0) || q > 1.0) {
      throw io_error("scenario file holds a survival probability outside (0, 1]: " +
                     file.string());
    }
    set.survival[i] = q;
  }
  return set;
}

}  // namespace longswap
