#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ocran/discrete.hpp"
#include "ocran/gaussian.hpp"

namespace ocran {

inline constexpr int kSchemaVersion = 1;

// A validated network description: users, relays, fronthaul, time-sharing law
// and the channel (Gaussian MIMO or discrete memoryless). Discrete scenarios
// may carry auxiliary test channels.
struct Scenario {
  std::variant<GaussianScenario, DiscreteScenario> channel;
  std::optional<AuxChannels> aux;

  bool is_gaussian() const { return std::holds_alternative<GaussianScenario>(channel); }
  const GaussianScenario& gaussian() const;
  const DiscreteScenario& discrete() const;
  int num_users() const;
  int num_relays() const;
  std::vector<double> fronthaul() const;
  std::vector<double> time_share() const;
};

// Throws ValidationError with the offending field named first in the message.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

// Compact serialization of scenario_to_json (keys sorted) and its FNV-1a 64 hash.
std::string canonical_text(const Scenario& sc);
std::string content_hash(const Scenario& sc);

// Complex matrices: array of rows; entries are [re, im] pairs or plain reals.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& field);

// {"B": [...]} or {"quantizers": {"B": [...]}}.
QuantizerSetGaussian parse_quantizers(const nlohmann::json& doc, const GaussianScenario& sc);
QuantizerSetGaussian load_quantizers(const std::filesystem::path& path, const GaussianScenario& sc);
nlohmann::json quantizers_to_json(const QuantizerSetGaussian& q);

// K nested tables [q][y][u].
AuxChannels parse_aux(const nlohmann::json& tables, const DiscreteScenario& sc);
nlohmann::json aux_to_json(const AuxChannels& aux, const DiscreteScenario& sc);
// {"aux": [...]} file, as written by the optimizer.
AuxChannels load_aux(const std::filesystem::path& path, const DiscreteScenario& sc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ocran
