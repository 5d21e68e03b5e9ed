// Model-file ingestion and report persistence. Matrices serialize as
// row-major nested arrays of [re, im] pairs; the parser additionally accepts
// the flat pair-list form when the shape is known from context. All artifact
// writes go through a single atomic temp-file-then-rename path.
#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symham/group.hpp"
#include "symham/homotopy.hpp"
#include "symham/mps.hpp"
#include "symham/parent_ham.hpp"
#include "symham/rep.hpp"

namespace symham {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Matrices.

inline json matrix_to_json(const cmat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline cx pair_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw error(errc::parse_error, "expected a [re, im] number pair, got " + j.dump());
  return cx(j[0].get<double>(), j[1].get<double>());
}

inline cmat matrix_from_json(const json& j, Eigen::Index rows = -1, Eigen::Index cols = -1) {
  if (!j.is_array() || j.empty())
    throw error(errc::parse_error, "matrix must be a nonempty array");
  const bool nested = j[0].is_array() && !j[0].empty() && j[0][0].is_array();
  if (nested) {
    Eigen::Index r = static_cast<Eigen::Index>(j.size());
    Eigen::Index c = static_cast<Eigen::Index>(j[0].size());
    cmat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (static_cast<Eigen::Index>(j[i].size()) != c)
        throw error(errc::parse_error, "ragged matrix rows");
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = pair_from_json(j[i][k]);
    }
    if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
      throw error(errc::parse_error, "matrix shape mismatch");
    return m;
  }
  // flat row-major pair list; the caller must supply the shape
  if (rows < 0 || cols < 0)
    throw error(errc::parse_error, "flat matrix form needs an explicit shape");
  if (static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw error(errc::parse_error, "flat matrix length does not match the declared shape");
  cmat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = pair_from_json(j[static_cast<std::size_t>(i * cols + k)]);
  return m;
}

// ---------------------------------------------------------------------------
// Model files.

struct TripleDef {
  Eigen::Index n = 0, k = 0;
  std::string group_ref, U_ref, u_ref;
  cmat V;
};

struct Model {
  std::string schema_version = "1";
  GroupPtr group;
  std::map<std::string, ProjectiveRep> reps;
  std::map<std::string, TripleDef> triples;
};

inline Model model_from_json(const json& j, const Tolerances& tol = default_tol()) {
  Model m;
  if (!j.contains("schema_version") || !j["schema_version"].is_string())
    throw error(errc::parse_error, "missing schema_version");
  m.schema_version = j["schema_version"].get<std::string>();
  if (m.schema_version != "1")
    throw error(errc::parse_error, "unsupported schema_version " + m.schema_version);
  if (!j.contains("group")) throw error(errc::parse_error, "missing group");
  const json& jg = j["group"];
  int order = jg.at("order").get<int>();
  auto mult = jg.at("mult").get<std::vector<std::vector<int>>>();
  cmat cocycle = jg.contains("cocycle") ? matrix_from_json(jg["cocycle"], order, order)
                                        : trivial_cocycle(order);
  m.group = validate_group_and_cocycle(mult, cocycle);

  if (j.contains("reps")) {
    for (const auto& [name, jr] : j["reps"].items()) {
      const json* mats_json = &jr;
      bool trivial = (name == "U");
      if (jr.is_object()) {
        const std::string which = jr.at("cocycle").get<std::string>();
        if (which == "trivial")
          trivial = true;
        else if (which == "group")
          trivial = false;
        else
          throw error(errc::parse_error, "rep cocycle must be 'trivial' or 'group'");
        mats_json = &jr.at("matrices");
      }
      if (!mats_json->is_array() || static_cast<int>(mats_json->size()) != order)
        throw error(errc::parse_error, "rep '" + name + "' needs one matrix per group element");
      std::vector<cmat> mats;
      for (const auto& jm : *mats_json) mats.push_back(matrix_from_json(jm));
      m.reps.emplace(name, validate_rep(mats, m.group,
                                        trivial ? trivial_cocycle(order) : m.group->cocycle, tol));
    }
  }

  if (j.contains("triples")) {
    for (const auto& [name, jt] : j["triples"].items()) {
      TripleDef t;
      t.n = jt.at("n").get<Eigen::Index>();
      t.k = jt.at("k").get<Eigen::Index>();
      t.group_ref = jt.value("group_ref", std::string("group"));
      t.U_ref = jt.at("U_ref").get<std::string>();
      t.u_ref = jt.at("u_ref").get<std::string>();
      if (t.group_ref != "group")
        throw error(errc::parse_error, "unresolved group_ref '" + t.group_ref + "'");
      if (!m.reps.count(t.U_ref))
        throw error(errc::parse_error, "unresolved U_ref '" + t.U_ref + "'");
      if (!m.reps.count(t.u_ref))
        throw error(errc::parse_error, "unresolved u_ref '" + t.u_ref + "'");
      t.V = matrix_from_json(jt.at("V"), t.n * t.k, t.k);
      m.triples.emplace(name, std::move(t));
    }
  }
  return m;
}

inline json model_to_json(const Model& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["group"] = {{"order", m.group->order},
                {"mult", m.group->mult},
                {"cocycle", matrix_to_json(m.group->cocycle)}};
  json reps = json::object();
  for (const auto& [name, rep] : m.reps) {
    json mats = json::array();
    for (const auto& mat : rep.mats) mats.push_back(matrix_to_json(mat));
    bool trivial = (rep.cocycle - trivial_cocycle(m.group->order)).norm() < 1e-14;
    reps[name] = {{"cocycle", trivial ? "trivial" : "group"}, {"matrices", std::move(mats)}};
  }
  j["reps"] = std::move(reps);
  json triples = json::object();
  for (const auto& [name, t] : m.triples)
    triples[name] = {{"n", t.n},         {"k", t.k},         {"group_ref", t.group_ref},
                     {"U_ref", t.U_ref}, {"u_ref", t.u_ref}, {"V", matrix_to_json(t.V)}};
  j["triples"] = std::move(triples);
  return j;
}

inline MpsTriple instantiate_triple(const Model& m, const std::string& name,
                                    const Tolerances& tol = default_tol()) {
  auto it = m.triples.find(name);
  if (it == m.triples.end())
    throw error(errc::parse_error, "no triple named '" + name + "' in the model");
  const TripleDef& t = it->second;
  const ProjectiveRep& bigu = m.reps.at(t.U_ref);
  const ProjectiveRep& u = m.reps.at(t.u_ref);
  if (bigu.dim != t.n || u.dim != t.k)
    throw error(errc::parse_error, "triple '" + name + "' dims disagree with its reps");
  return validate_sp_triple(m.group, bigu, u, t.V, tol);
}

// ---------------------------------------------------------------------------
// File IO. Reports funnel through one atomic writer.

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw error(errc::parse_error, "cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os.good()) throw error(errc::parse_error, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw error(errc::parse_error, "cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw error(errc::parse_error, path.string() + ": " + e.what());
  }
}

inline Model load_model(const std::filesystem::path& path,
                        const Tolerances& tol = default_tol()) {
  return model_from_json(load_json_file(path), tol);
}

// ---------------------------------------------------------------------------
// Report serialization.

inline json tolerances_to_json(const Tolerances& t) {
  return {{"rank", t.rank}, {"herm", t.herm},   {"unitary", t.unitary}, {"eig", t.eig},
          {"pf", t.pf},     {"rep", t.rep},     {"deg", t.deg},         {"max_iter", t.max_iter}};
}

inline json certificate_to_json(const PrimitivityCertificate& c) {
  json j;
  j["primitive"] = c.primitive;
  j["final_span_dim"] = c.final_span_dim;
  if (c.primitive) {
    j["injectivity_length"] = c.injectivity_length;
    j["witness_words"] = c.witness_words;
    j["witness_det_modulus"] = c.witness_det_modulus;
  }
  return j;
}

inline json perron_to_json(const PerronData& p) {
  return {{"r", p.r}, {"e", matrix_to_json(p.e)}, {"phi", matrix_to_json(p.phi)}};
}

inline json interaction_to_json(const LocalInteraction& li) {
  return {{"window", li.window},
          {"phys", li.phys},
          {"ground_dim", li.ground_dim},
          {"ground_projection", matrix_to_json(li.ground_projection)},
          {"h", matrix_to_json(li.h)}};
}

inline json gap_report_to_json(const GapReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["N"] = row.length;
    json ev = json::array();
    for (Eigen::Index i = 0; i < row.eigenvalues.size(); ++i) ev.push_back(row.eigenvalues(i));
    jr["eigenvalues"] = std::move(ev);
    jr["ground_energy"] = row.ground_energy;
    jr["degeneracy"] = row.degeneracy;
    jr["gap_defined"] = row.gap_defined;
    if (row.gap_defined) jr["gap"] = row.gap;
    rows.push_back(std::move(jr));
  }
  return {{"rows", std::move(rows)},
          {"gamma_estimate", r.gamma_estimate},
          {"all_gaps_defined", r.all_gaps_defined}};
}

inline std::string gap_report_csv(const GapReport& r) {
  std::ostringstream os;
  Eigen::Index q = r.rows.empty() ? 0 : r.rows.front().eigenvalues.size();
  os << "N";
  for (Eigen::Index i = 0; i < q; ++i) os << ",e" << i;
  os << ",degeneracy,gap\n";
  os.precision(17);
  for (const auto& row : r.rows) {
    os << row.length;
    for (Eigen::Index i = 0; i < row.eigenvalues.size(); ++i) os << "," << row.eigenvalues(i);
    os << "," << row.degeneracy << ",";
    if (row.gap_defined) os << row.gap;
    os << "\n";
  }
  return os.str();
}

inline json contour_to_json(const Contour& c) {
  json samples = json::array();
  for (const auto& s : c.samples)
    samples.push_back({{"t", s.t},
                       {"value", {s.value.real(), s.value.imag()}},
                       {"primitive", s.primitive},
                       {"injectivity_length", s.injectivity_length},
                       {"witness0", s.witness0},
                       {"witness1", s.witness1}});
  return {{"epsilon", c.epsilon}, {"samples", std::move(samples)}};
}

inline json path_to_json(const HamiltonianPath& p) {
  json j;
  j["n"] = p.n;
  j["k"] = p.k;
  j["window"] = p.window;
  json gauge;
  gauge["W"] = matrix_to_json(p.gauge.W_gauge);
  gauge["H"] = matrix_to_json(p.gauge.H_W);
  gauge["s"] = p.gauge.s;
  json gu = json::array();
  for (const auto& w : p.gauge.unitaries) gu.push_back(matrix_to_json(w));
  gauge["unitaries"] = std::move(gu);
  gauge["interaction"] = interaction_to_json(p.gauge.interaction);
  gauge["max_delta_h"] = p.gauge.max_delta;
  j["segment_A"] = std::move(gauge);
  j["contour"] = contour_to_json(p.contour);
  json samples = json::array();
  for (const auto& s : p.samples) {
    json js;
    js["t"] = s.t;
    js["contour_value"] = {s.contour_value.real(), s.contour_value.imag()};
    json kraus = json::array();
    for (const auto& v : s.kraus.v) kraus.push_back(matrix_to_json(v));
    js["kraus"] = std::move(kraus);
    js["perron"] = perron_to_json(s.perron);
    js["interaction"] = interaction_to_json(s.interaction);
    js["injectivity_length"] = s.injectivity_length;
    js["unitality_residual"] = s.unitality;
    js["intertwiner_residual"] = s.intertwiner;
    js["e_commutator"] = s.e_commutator;
    samples.push_back(std::move(js));
  }
  j["segment_B"] = std::move(samples);
  j["endpoint_certificates"] = {certificate_to_json(p.cert0), certificate_to_json(p.cert1)};
  j["rotation_generator_norm"] = p.rotation_generator_norm;
  j["endpoint_delta_kraus"] = {p.endpoint_delta_kraus0, p.endpoint_delta_kraus1};
  j["endpoint_delta_h"] = {p.endpoint_delta_h0, p.endpoint_delta_h1};
  return j;
}

inline json path_report_to_json(const PathReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"segment", row.segment},
                    {"t", row.t},
                    {"gap_minN", row.min_gap},
                    {"gap_defined", row.gap_defined},
                    {"symmetry_residual", row.symmetry},
                    {"intertwiner_residual", row.intertwiner},
                    {"delta_h", row.delta_h}});
  return {{"rows", std::move(rows)},
          {"min_gap", r.min_gap},
          {"max_symmetry_residual", r.max_symmetry},
          {"max_intertwiner_residual", r.max_intertwiner},
          {"max_first_difference", r.max_first_difference},
          {"max_second_difference", r.max_second_difference},
          {"continuity_constant", r.continuity_constant},
          {"pass", r.pass},
          {"failure_reason", r.failure_reason}};
}

inline std::string path_report_csv(const PathReport& r) {
  std::ostringstream os;
  os << "segment,t,gap_minN,symmetry_residual,intertwiner_residual,delta_h\n";
  os.precision(17);
  for (const auto& row : r.rows)
    os << row.segment << "," << row.t << "," << row.min_gap << "," << row.symmetry << ","
       << row.intertwiner << "," << row.delta_h << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Run reports. Everything except the `timings` field is deterministic given
// (model file, flags, seed); artifact files never carry timings.

struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  Tolerances tol;
  json results = json::object();
  double wall_seconds = 0.0;
  bool pass = false;
};

inline json run_report_to_json(const RunReport& r, bool with_timings = true) {
  json j;
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["tolerances"] = tolerances_to_json(r.tol);
  j["results"] = r.results;
  j["pass"] = r.pass;
  if (with_timings) j["timings"] = {{"wall_seconds", r.wall_seconds}};
  return j;
}

}  // namespace symham
