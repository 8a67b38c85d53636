#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hubofact/bigint.hpp"
#include "hubofact/model.hpp"
#include "hubofact/quadratize.hpp"

namespace hubofact {

inline constexpr const char* kModelFormatName = "hubofact-model";
inline constexpr const char* kModelFormatVersion = "1";

struct LoadedModel {
  FactorModel model;
  std::optional<ReductionLedger> ledger;
};

namespace detail {

inline nlohmann::json model_to_json(const FactorModel& model,
                                    const ReductionLedger* ledger) {
  nlohmann::json j;
  j["format"] = kModelFormatName;
  j["format_version"] = kModelFormatVersion;
  j["variables"] = model.total_vars;
  j["degree"] = model.poly.degree();
  j["offset"] = to_decimal(model.poly.offset());
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [vars, coeff] : model.poly.terms()) {
    nlohmann::json term;
    term["vars"] = vars;
    term["coeff"] = to_decimal(coeff);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  nlohmann::json meta;
  meta["big_n"] = to_decimal(model.big_n);
  meta["bits_per_factor"] = model.layout.bits_per_factor;
  meta["fix_lsb"] = model.layout.fix_lsb;
  meta["p_offset"] = to_decimal(model.layout.p_offset);
  meta["q_offset"] = to_decimal(model.layout.q_offset);
  meta["energy_shift"] = to_decimal(model.energy_shift);
  meta["reduction_shift"] = to_decimal(model.reduction_shift);
  meta["target_energy"] = to_decimal(model.target_energy());
  j["metadata"] = std::move(meta);
  if (ledger != nullptr && !ledger->records.empty()) {
    nlohmann::json red;
    red["first_ancilla"] = ledger->first_ancilla;
    red["total_shift"] = to_decimal(ledger->total_shift);
    red["reduced_target"] = to_decimal(ledger->reduced_target);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : ledger->records) {
      nlohmann::json rec;
      switch (r.kind) {
        case GadgetKind::CubicNeg: rec["kind"] = "cubic_neg"; break;
        case GadgetKind::CubicPos: rec["kind"] = "cubic_pos"; break;
        case GadgetKind::QuarticPos: rec["kind"] = "quartic_pos"; break;
      }
      rec["source_vars"] = r.source_vars;
      rec["coeff"] = to_decimal(r.coeff);
      rec["ancillas"] = r.ancillas;
      rec["constant_shift"] = to_decimal(r.constant_shift);
      records.push_back(std::move(rec));
    }
    red["records"] = std::move(records);
    j["reduction"] = std::move(red);
  }
  return j;
}

inline BigInt json_decimal(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseFailure("missing or non-string integer field '" + key + "'");
  }
  return parse_decimal(j.at(key).get<std::string>());
}

}  // namespace detail

inline std::string model_to_string(const FactorModel& model,
                                   const ReductionLedger* ledger = nullptr) {
  return detail::model_to_json(model, ledger).dump(2) + "\n";
}

/// Canonical JSON with every integer as an exact decimal string. Unknown
/// fields in a loaded file are ignored; the format version is not.
inline void save_model(const FactorModel& model, const std::string& path,
                       const ReductionLedger* ledger = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << model_to_string(model, ledger);
  if (!out) throw IoFailure("failed writing '" + path + "'");
}

inline LoadedModel model_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseFailure(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != kModelFormatName) {
      throw ParseFailure("not a model file (missing format marker)");
    }
    if (j.value("format_version", std::string()) != kModelFormatVersion) {
      throw VersionMismatch("unsupported model format version '" +
                            j.value("format_version", std::string("<absent>")) + "'");
    }
    LoadedModel loaded;
    FactorModel& model = loaded.model;
    const nlohmann::json& meta = j.at("metadata");
    model.big_n = detail::json_decimal(meta, "big_n");
    model.layout.bits_per_factor = meta.at("bits_per_factor").get<std::uint32_t>();
    model.layout.fix_lsb = meta.at("fix_lsb").get<bool>();
    model.layout.p_offset = detail::json_decimal(meta, "p_offset");
    model.layout.q_offset = detail::json_decimal(meta, "q_offset");
    model.energy_shift = detail::json_decimal(meta, "energy_shift");
    model.reduction_shift = detail::json_decimal(meta, "reduction_shift");
    model.total_vars = j.at("variables").get<std::uint32_t>();
    model.poly = BinaryPolynomial(detail::json_decimal(j, "offset"));
    for (const auto& term : j.at("terms")) {
      const auto vars = term.at("vars").get<std::vector<VarId>>();
      model.poly.add_term(vars, detail::json_decimal(term, "coeff"));
    }
    if (j.contains("reduction")) {
      const nlohmann::json& red = j.at("reduction");
      ReductionLedger ledger;
      ledger.first_ancilla = red.at("first_ancilla").get<VarId>();
      ledger.total_shift = detail::json_decimal(red, "total_shift");
      ledger.reduced_target = detail::json_decimal(red, "reduced_target");
      for (const auto& rec : red.at("records")) {
        GadgetRecord record;
        const std::string kind = rec.at("kind").get<std::string>();
        if (kind == "cubic_neg") {
          record.kind = GadgetKind::CubicNeg;
        } else if (kind == "cubic_pos") {
          record.kind = GadgetKind::CubicPos;
        } else if (kind == "quartic_pos") {
          record.kind = GadgetKind::QuarticPos;
        } else {
          throw ParseFailure("unknown gadget kind '" + kind + "'");
        }
        record.source_vars = rec.at("source_vars").get<std::vector<VarId>>();
        record.coeff = detail::json_decimal(rec, "coeff");
        record.ancillas = rec.at("ancillas").get<std::vector<VarId>>();
        record.constant_shift = detail::json_decimal(rec, "constant_shift");
        ledger.records.push_back(std::move(record));
      }
      loaded.ledger = std::move(ledger);
    }
    return loaded;
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseFailure(std::string("malformed model file: ") + e.what());
  }
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_string(buffer.str());
}

/// Flat upper-triangular coordinate dump for external QUBO tools: one
/// "i j coeff" line per term (i == j for linear terms), preceded by comment
/// lines carrying the constant offset. Only degree <= 2 models qualify;
/// higher-order models are JSON-only.
inline std::string qubo_to_coordinate_string(const FactorModel& model) {
  if (model.poly.degree() > 2) {
    throw UnsupportedDegree("coordinate export is for degree <= 2 models; quadratize first");
  }
  std::ostringstream out;
  out << "# " << kModelFormatName << " coordinate export\n";
  out << "# offset " << to_decimal(model.poly.offset()) << "\n";
  for (const auto& [vars, coeff] : model.poly.terms()) {
    const VarId i = vars.front();
    const VarId j = vars.back();
    out << i << " " << j << " " << to_decimal(coeff) << "\n";
  }
  return out.str();
}

inline void save_qubo_coordinates(const FactorModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << qubo_to_coordinate_string(model);
  if (!out) throw IoFailure("failed writing '" + path + "'");
}

}  // namespace hubofact
