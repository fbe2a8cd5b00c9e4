#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "ocran/error.hpp"
#include "ocran/scenario.hpp"

using namespace ocran;
using nlohmann::json;

namespace {

const std::filesystem::path data_dir = OCRAN_TEST_DATA;

json golden_doc() { return read_json_file(data_dir / "golden_scalar.json"); }

std::string error_of(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ocran_test_" + name);
}

}  // namespace

TEST_CASE("golden scenario loads") {
  Scenario sc = load_scenario(data_dir / "golden_scalar.json");
  REQUIRE(sc.is_gaussian());
  CHECK(sc.num_users() == 1);
  CHECK(sc.num_relays() == 1);
  CHECK(sc.fronthaul() == std::vector<double>{2.0});
  CHECK(sc.gaussian().channel[0][0](0, 0) == std::complex<double>(1.0, 0.0));
  CHECK_THROWS_AS(sc.discrete(), ValidationError);
}

TEST_CASE("save and load round trip is canonical") {
  for (const char* name : {"golden_scalar.json", "two_user_symmetric.json", "two_relay_factorizing.json",
                           "correlated_relays.json", "bsc_no_aux.json"}) {
    CAPTURE(name);
    Scenario sc = load_scenario(data_dir / name);
    auto path = temp_path(name);
    save_scenario(sc, path);
    Scenario back = load_scenario(path);
    CHECK(canonical_text(back) == canonical_text(sc));
    CHECK(content_hash(back) == content_hash(sc));
    CHECK(back.aux.has_value() == sc.aux.has_value());
    std::filesystem::remove(path);
  }
}

TEST_CASE("content hash is stable and sensitive") {
  Scenario a = parse_scenario(golden_doc());
  Scenario b = parse_scenario(golden_doc());
  CHECK(content_hash(a) == content_hash(b));
  CHECK(content_hash(a).size() == 16);
  json doc = golden_doc();
  doc["fronthaul"] = {2.5};
  CHECK(content_hash(parse_scenario(doc)) != content_hash(a));
  // key order and whitespace do not matter
  json reordered = json::parse(golden_doc().dump(4));
  CHECK(content_hash(parse_scenario(reordered)) == content_hash(a));
}

TEST_CASE("scenario validation names the field") {
  json doc = golden_doc();
  doc.erase("users");
  CHECK(starts_with(error_of(doc), "users"));

  doc = golden_doc();
  doc["schema"] = 2;
  CHECK(starts_with(error_of(doc), "schema"));

  doc = golden_doc();
  doc["fronthaul"] = {-1.0};
  CHECK(starts_with(error_of(doc), "fronthaul"));

  doc = golden_doc();
  doc["fronthaul"] = {1.0, 2.0};
  CHECK(starts_with(error_of(doc), "fronthaul"));

  doc = golden_doc();
  doc["time_share"] = {0.5, 0.5};
  CHECK(starts_with(error_of(doc), "time_share"));

  doc = golden_doc();
  doc["time_share"] = {0.9};
  CHECK(starts_with(error_of(doc), "time_share"));

  doc = golden_doc();
  doc["channel"]["Sigma"] = {{{-1.0}}};
  CHECK(error_of(doc).find("Sigma") != std::string::npos);

  doc = golden_doc();
  doc["channel"]["Kin"] = {{{3.0}}};
  CHECK(error_of(doc).find("Kin") != std::string::npos);

  doc = golden_doc();
  doc["channel"]["kind"] = "optical";
  CHECK(starts_with(error_of(doc), "channel.kind"));
}

TEST_CASE("discrete validation") {
  json doc = read_json_file(data_dir / "bsc_no_aux.json");
  CHECK(error_of(doc).empty());

  json bad = doc;
  bad["channel"]["channel"] = {0.8, 0.1, 0.11, 0.89};
  CHECK(error_of(bad).find("channel") != std::string::npos);

  bad = doc;
  bad["channel"]["px"] = {{{0.5, 0.6}}};
  CHECK(error_of(bad).find("px") != std::string::npos);

  bad = doc;
  bad["channel"]["aux"] = {{{{1.0, 0.0}}}};  // only one y row
  CHECK(error_of(bad).find("aux") != std::string::npos);

  bad = doc;
  bad["channel"]["alphabets"]["Q"] = 2;
  CHECK(error_of(bad).find("alphabets.Q") != std::string::npos);
}

TEST_CASE("aux tables round trip") {
  Scenario sc = load_scenario(data_dir / "two_relay_factorizing.json");
  REQUIRE(sc.aux.has_value());
  const auto& d = sc.discrete();
  CHECK(sc.aux->prob(d, 1, 1, 0, 1) == doctest::Approx(0.3));
  AuxChannels back = parse_aux(aux_to_json(*sc.aux, d), d);
  CHECK(back.table == sc.aux->table);
  CHECK(back.sizes == sc.aux->sizes);
  auto path = temp_path("aux.json");
  {
    std::ofstream out(path);
    out << json{{"aux", aux_to_json(*sc.aux, d)}}.dump();
  }
  CHECK(load_aux(path, d).table == sc.aux->table);
  std::filesystem::remove(path);
}

TEST_CASE("matrix json entries") {
  CMatrix m = matrix_from_json(json::parse("[[1, [0, 2]], [[0, -2], 3.5]]"), "M");
  CHECK(m(0, 1) == std::complex<double>(0.0, 2.0));
  CHECK(m(1, 1) == std::complex<double>(3.5, 0.0));
  CHECK(matrix_from_json(matrix_to_json(m), "M") == m);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]"), "M"), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[\"a\"]]"), "M"), ValidationError);
}

TEST_CASE("quantizer files") {
  Scenario sc = load_scenario(data_dir / "golden_scalar.json");
  auto q = load_quantizers(data_dir / "golden_b.json", sc.gaussian());
  CHECK(q.b[0](0, 0).real() == doctest::Approx(0.5));
  auto wrapped = parse_quantizers(json{{"quantizers", quantizers_to_json(q)}}, sc.gaussian());
  CHECK(wrapped.b[0] == q.b[0]);
  CHECK_THROWS_AS(parse_quantizers(json::parse(R"({"B": [[[2.0]]]})"), sc.gaussian()), ValidationError);
  CHECK_THROWS_AS(parse_quantizers(json::parse(R"({"B": [[[0.1]], [[0.1]]]})"), sc.gaussian()), ValidationError);
  CHECK_THROWS_AS(parse_quantizers(json::parse(R"({"C": 1})"), sc.gaussian()), ValidationError);
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(load_scenario(data_dir / "does_not_exist.json"), ValidationError);
  auto path = temp_path("broken.json");
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  try {
    load_scenario(path);
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  std::filesystem::remove(path);
}
