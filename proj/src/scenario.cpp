#include "ocran/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ocran/error.hpp"

namespace ocran {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& prefix = "") {
  const std::string field = prefix.empty() ? key : prefix + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError(field + ": missing");
  return obj.at(key);
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ValidationError(field + ": expected an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field + ": expected a number");
  return j.get<double>();
}

std::vector<double> as_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> as_ints(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Nested arrays flattened row-major with the expected shape.
void flatten_into(const json& j, std::span<const int> shape, const std::string& field, std::vector<double>& out) {
  if (shape.empty()) {
    out.push_back(as_number(j, field));
    return;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != shape[0]) {
    throw ValidationError(field + ": expected an array of length " + std::to_string(shape[0]));
  }
  for (std::size_t i = 0; i < j.size(); ++i) flatten_into(j[i], shape.subspan(1), field, out);
}

json nest(std::span<const double> flat, std::span<const int> shape) {
  if (shape.size() == 1) return json(std::vector<double>(flat.begin(), flat.end()));
  json out = json::array();
  const std::size_t inner = flat.size() / static_cast<std::size_t>(shape[0]);
  for (int i = 0; i < shape[0]; ++i) out.push_back(nest(flat.subspan(i * inner, inner), shape.subspan(1)));
  return out;
}

void check_time_share(const std::vector<double>& p) {
  if (p.empty()) throw ValidationError("time_share: at least one entry is required");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("time_share: probabilities must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("time_share: probabilities sum to " + std::to_string(total) + ", expected 1");
  }
}

GaussianScenario parse_gaussian(const json& ch, int users, int relays, std::vector<double> fronthaul) {
  GaussianScenario sc;
  sc.fronthaul = std::move(fronthaul);
  const json& h = require(ch, "H", "channel");
  if (!h.is_array() || static_cast<int>(h.size()) != relays) {
    throw ValidationError("channel.H: expected " + std::to_string(relays) + " rows (one per relay)");
  }
  for (int k = 0; k < relays; ++k) {
    if (!h[k].is_array() || static_cast<int>(h[k].size()) != users) {
      throw ValidationError("channel.H[" + std::to_string(k) + "]: expected " + std::to_string(users) + " matrices");
    }
    std::vector<CMatrix> row;
    for (int l = 0; l < users; ++l) {
      row.push_back(matrix_from_json(h[k][l], "channel.H[" + std::to_string(k) + "][" + std::to_string(l) + "]"));
    }
    sc.channel.push_back(std::move(row));
  }
  const json& sigma = require(ch, "Sigma", "channel");
  if (!sigma.is_array() || static_cast<int>(sigma.size()) != relays) {
    throw ValidationError("channel.Sigma: expected one matrix per relay");
  }
  for (int k = 0; k < relays; ++k) sc.noise_cov.push_back(matrix_from_json(sigma[k], "channel.Sigma[" + std::to_string(k) + "]"));
  const json& kin = require(ch, "Kin", "channel");
  if (!kin.is_array() || static_cast<int>(kin.size()) != users) throw ValidationError("channel.Kin: expected one matrix per user");
  for (int l = 0; l < users; ++l) sc.input_cov.push_back(matrix_from_json(kin[l], "channel.Kin[" + std::to_string(l) + "]"));
  sc.power = as_numbers(require(ch, "power", "channel"), "channel.power");
  if (static_cast<int>(sc.power.size()) != users) throw ValidationError("channel.power: expected one entry per user");
  try {
    sc.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("channel.") + e.what());
  }
  return sc;
}

DiscreteScenario parse_discrete(const json& ch, int users, int relays, std::vector<double> fronthaul,
                                std::vector<double> time_share, std::optional<AuxChannels>& aux) {
  DiscreteScenario sc;
  sc.fronthaul = std::move(fronthaul);
  sc.time_share = std::move(time_share);
  const json& alph = require(ch, "alphabets", "channel");
  sc.input_sizes = as_ints(require(alph, "X", "channel.alphabets"), "channel.alphabets.X");
  sc.output_sizes = as_ints(require(alph, "Y", "channel.alphabets"), "channel.alphabets.Y");
  if (static_cast<int>(sc.input_sizes.size()) != users) throw ValidationError("channel.alphabets.X: expected one size per user");
  if (static_cast<int>(sc.output_sizes.size()) != relays) {
    throw ValidationError("channel.alphabets.Y: expected one size per relay");
  }
  if (alph.contains("Q") && as_int(alph["Q"], "channel.alphabets.Q") != sc.num_q()) {
    throw ValidationError("channel.alphabets.Q: does not match the length of time_share");
  }
  for (int s : sc.input_sizes) {
    if (s < 1) throw ValidationError("channel.alphabets.X: sizes must be positive");
  }
  for (int s : sc.output_sizes) {
    if (s < 1) throw ValidationError("channel.alphabets.Y: sizes must be positive");
  }
  const json& px = require(ch, "px", "channel");
  if (!px.is_array() || static_cast<int>(px.size()) != users) throw ValidationError("channel.px: expected one table per user");
  for (int l = 0; l < users; ++l) {
    std::vector<double> table;
    const int shape[] = {sc.num_q(), sc.input_sizes[l]};
    flatten_into(px[l], shape, "channel.px[" + std::to_string(l) + "]", table);
    sc.input_pmf.push_back(std::move(table));
  }
  sc.channel = as_numbers(require(ch, "channel", "channel"), "channel.channel");
  try {
    sc.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("channel.") + e.what());
  }
  if (ch.contains("aux") && !ch["aux"].is_null()) {
    AuxChannels parsed = parse_aux(ch["aux"], sc);
    if (alph.contains("U") && as_ints(alph["U"], "channel.alphabets.U") != parsed.sizes) {
      throw ValidationError("channel.alphabets.U: does not match the aux tables");
    }
    aux = std::move(parsed);
  }
  return sc;
}

}  // namespace

const GaussianScenario& Scenario::gaussian() const {
  if (!is_gaussian()) throw ValidationError("channel.kind: a Gaussian scenario is required");
  return std::get<GaussianScenario>(channel);
}

const DiscreteScenario& Scenario::discrete() const {
  if (is_gaussian()) throw ValidationError("channel.kind: a discrete scenario is required");
  return std::get<DiscreteScenario>(channel);
}

int Scenario::num_users() const {
  return std::visit([](const auto& c) { return c.num_users(); }, channel);
}

int Scenario::num_relays() const {
  return std::visit([](const auto& c) { return c.num_relays(); }, channel);
}

std::vector<double> Scenario::fronthaul() const {
  return std::visit([](const auto& c) { return c.fronthaul; }, channel);
}

std::vector<double> Scenario::time_share() const {
  if (is_gaussian()) return {1.0};
  return discrete().time_share;
}

CMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ValidationError(field + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  if (cols == 0) throw ValidationError(field + ": empty row");
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError(field + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (e.is_number()) {
        m(r, c) = {e.get<double>(), 0.0};
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw ValidationError(field + ": entries must be numbers or [re, im] pairs");
      }
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) throw ValidationError(field + ": non-finite entry");
    }
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Scenario parse_scenario(const json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("scenario: expected a JSON object");
    if (doc.contains("schema") && as_int(doc["schema"], "schema") != kSchemaVersion) {
      throw ValidationError("schema: unsupported version (expected 1)");
    }
    const int users = as_int(require(doc, "users"), "users");
    const int relays = as_int(require(doc, "relays"), "relays");
    if (users < 1) throw ValidationError("users: must be at least 1");
    if (relays < 1) throw ValidationError("relays: must be at least 1");
    auto fronthaul = as_numbers(require(doc, "fronthaul"), "fronthaul");
    if (static_cast<int>(fronthaul.size()) != relays) throw ValidationError("fronthaul: expected one entry per relay");
    for (double c : fronthaul) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("fronthaul: capacities must be finite and nonnegative");
    }
    auto time_share = as_numbers(require(doc, "time_share"), "time_share");
    check_time_share(time_share);
    const json& ch = require(doc, "channel");
    const json& kind = require(ch, "kind", "channel");
    if (!kind.is_string()) throw ValidationError("channel.kind: expected a string");
    Scenario sc;
    if (kind == "gaussian") {
      if (time_share.size() != 1) throw ValidationError("time_share: Gaussian scenarios do not use time-sharing (|Q| must be 1)");
      sc.channel = parse_gaussian(ch, users, relays, std::move(fronthaul));
    } else if (kind == "discrete") {
      sc.channel = parse_discrete(ch, users, relays, std::move(fronthaul), std::move(time_share), sc.aux);
    } else {
      throw ValidationError("channel.kind: must be \"gaussian\" or \"discrete\"");
    }
    return sc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": parse error: " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_json_file(path)); }

json scenario_to_json(const Scenario& sc) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["users"] = sc.num_users();
  doc["relays"] = sc.num_relays();
  doc["fronthaul"] = sc.fronthaul();
  doc["time_share"] = sc.time_share();
  json ch;
  if (sc.is_gaussian()) {
    const auto& g = sc.gaussian();
    ch["kind"] = "gaussian";
    json h = json::array();
    for (const auto& row : g.channel) {
      json r = json::array();
      for (const auto& m : row) r.push_back(matrix_to_json(m));
      h.push_back(std::move(r));
    }
    ch["H"] = std::move(h);
    ch["Sigma"] = json::array();
    for (const auto& m : g.noise_cov) ch["Sigma"].push_back(matrix_to_json(m));
    ch["Kin"] = json::array();
    for (const auto& m : g.input_cov) ch["Kin"].push_back(matrix_to_json(m));
    ch["power"] = g.power;
  } else {
    const auto& d = sc.discrete();
    ch["kind"] = "discrete";
    ch["alphabets"] = {{"Q", d.num_q()}, {"X", d.input_sizes}, {"Y", d.output_sizes}};
    ch["px"] = json::array();
    for (int l = 0; l < d.num_users(); ++l) {
      const int shape[] = {d.num_q(), d.input_sizes[l]};
      ch["px"].push_back(nest(d.input_pmf[l], shape));
    }
    ch["channel"] = d.channel;
    if (sc.aux) {
      ch["alphabets"]["U"] = sc.aux->sizes;
      ch["aux"] = aux_to_json(*sc.aux, d);
    }
  }
  doc["channel"] = std::move(ch);
  return doc;
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path.string() + ": cannot write file");
  out << scenario_to_json(sc).dump(2) << '\n';
}

std::string canonical_text(const Scenario& sc) { return scenario_to_json(sc).dump(); }

std::string content_hash(const Scenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

QuantizerSetGaussian parse_quantizers(const json& doc, const GaussianScenario& sc) {
  const json* b = nullptr;
  if (doc.is_object() && doc.contains("B")) {
    b = &doc["B"];
  } else if (doc.is_object() && doc.contains("quantizers") && doc["quantizers"].contains("B")) {
    b = &doc["quantizers"]["B"];
  } else {
    throw ValidationError("B: missing quantizer matrices");
  }
  if (!b->is_array()) throw ValidationError("B: expected an array of matrices");
  QuantizerSetGaussian q;
  for (std::size_t k = 0; k < b->size(); ++k) q.b.push_back(matrix_from_json((*b)[k], "B[" + std::to_string(k) + "]"));
  validate_quantizers(sc, q);
  return q;
}

QuantizerSetGaussian load_quantizers(const std::filesystem::path& path, const GaussianScenario& sc) {
  return parse_quantizers(read_json_file(path), sc);
}

json quantizers_to_json(const QuantizerSetGaussian& q) {
  json b = json::array();
  for (const auto& m : q.b) b.push_back(matrix_to_json(m));
  return json{{"B", std::move(b)}};
}

AuxChannels parse_aux(const json& tables, const DiscreteScenario& sc) {
  if (!tables.is_array() || static_cast<int>(tables.size()) != sc.num_relays()) {
    throw ValidationError("aux: expected one table per relay");
  }
  AuxChannels aux;
  for (int k = 0; k < sc.num_relays(); ++k) {
    const std::string field = "aux[" + std::to_string(k) + "]";
    const json& t = tables[k];
    if (!t.is_array() || t.empty() || !t[0].is_array() || t[0].empty() || !t[0][0].is_array()) {
      throw ValidationError(field + ": expected nested [q][y][u] arrays");
    }
    const int u_size = static_cast<int>(t[0][0].size());
    std::vector<double> flat;
    const int shape[] = {sc.num_q(), sc.output_sizes[k], u_size};
    flatten_into(t, shape, field, flat);
    aux.sizes.push_back(u_size);
    aux.table.push_back(std::move(flat));
  }
  validate_aux(sc, aux);
  return aux;
}

json aux_to_json(const AuxChannels& aux, const DiscreteScenario& sc) {
  json out = json::array();
  for (int k = 0; k < sc.num_relays(); ++k) {
    const int shape[] = {sc.num_q(), sc.output_sizes[k], aux.sizes[k]};
    out.push_back(nest(aux.table[k], shape));
  }
  return out;
}

AuxChannels load_aux(const std::filesystem::path& path, const DiscreteScenario& sc) {
  json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("aux")) throw ValidationError("aux: missing");
  return parse_aux(doc["aux"], sc);
}

}  // namespace ocran
