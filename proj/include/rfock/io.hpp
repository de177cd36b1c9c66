#pragma once

// JSON and CSV formats.
//
//   hoop:        {"loops": [{"weight": int, "vertices": [[x,y,z], ...]}, ...]}
//   test field:  {"terms": [{"weight": w, "scale": s, "hoop": <hoop>}, ...]}
//   measure:     {"kind": "haar"|"gaussian", "family": [<hoop>, ...],
//                 "mean": [...], "cov": [[...], ...], "r": r,
//                 "mollifier": "paper"|"unit", "tol": tol}
//   samples CSV: header theta_0,...,theta_{n-1}; one row per draw, radians.

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfock/covariance.hpp"
#include "rfock/cylindrical.hpp"
#include "rfock/errors.hpp"
#include "rfock/geometry.hpp"
#include "rfock/singularity_lab.hpp"

namespace rfock::io {

using nlohmann::json;

/// Input error naming the offending field.
class FieldError : public InvalidArgument {
 public:
  FieldError(const std::string& field, const std::string& what)
      : InvalidArgument("field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw FieldError(path + key, "missing");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw FieldError(path, "expected a number");
  return j.get<double>();
}

inline Vec3 vec3_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw FieldError(path, "expected [x, y, z]");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"), as_number(j[2], path + "[2]")};
}

inline json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Hoop hoop_from_json(const json& j, const std::string& path = "") {
  const json& loops = require(j, "loops", path);
  if (!loops.is_array()) throw FieldError(path + "loops", "expected an array");
  Hoop h;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const std::string lp = path + "loops[" + std::to_string(i) + "].";
    const json& entry = loops[i];
    std::int64_t weight = 1;
    if (entry.contains("weight")) {
      if (!entry.at("weight").is_number_integer())
        throw FieldError(lp + "weight", "expected an integer");
      weight = entry.at("weight").get<std::int64_t>();
    }
    const json& verts = require(entry, "vertices", lp);
    if (!verts.is_array()) throw FieldError(lp + "vertices", "expected an array of points");
    std::vector<Vec3> pts;
    for (std::size_t k = 0; k < verts.size(); ++k)
      pts.push_back(vec3_from_json(verts[k], lp + "vertices[" + std::to_string(k) + "]"));
    try {
      h.add(make_loop(pts), weight);
    } catch (const DegenerateLoop& e) {
      throw FieldError(lp + "vertices", e.what());
    }
  }
  return h;
}

inline json hoop_to_json(const Hoop& h) {
  json loops = json::array();
  for (const auto& [loop, w] : h.terms()) {
    json verts = json::array();
    for (const auto& v : loop.traversal()) verts.push_back(vec3_to_json(v));
    loops.push_back({{"weight", w}, {"vertices", verts}});
  }
  return {{"loops", loops}};
}

inline std::vector<Hoop> family_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw FieldError(path, "expected an array of hoops");
  std::vector<Hoop> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(hoop_from_json(j[i], path + "[" + std::to_string(i) + "]."));
  return out;
}

inline TestField test_field_from_json(const json& j, const std::string& path = "") {
  const json& terms = j.is_array() ? j : require(j, "terms", path);
  if (!terms.is_array()) throw FieldError(path + "terms", "expected an array");
  TestField f;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + "terms[" + std::to_string(i) + "].";
    const double w = as_number(require(terms[i], "weight", tp), tp + "weight");
    const double s = as_number(require(terms[i], "scale", tp), tp + "scale");
    if (!(s > 0.0)) throw FieldError(tp + "scale", "must be > 0");
    f.add(w, hoop_from_json(require(terms[i], "hoop", tp), tp + "hoop."), SmearingScale(s));
  }
  return f;
}

inline json test_field_to_json(const TestField& f) {
  json terms = json::array();
  for (const auto& t : f.terms)
    terms.push_back({{"weight", t.weight}, {"scale", t.scale}, {"hoop", hoop_to_json(t.hoop)}});
  return {{"terms", terms}};
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw FieldError(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw FieldError(path, "expected an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw FieldError(path + "[" + std::to_string(i) + "]", "expected a square matrix row");
    for (Eigen::Index k = 0; k < n; ++k)
      m(i, k) = as_number(row[static_cast<std::size_t>(k)], path);
  }
  return m;
}

inline json measure_to_json(const CylindricalMeasure& m) {
  json fam = json::array();
  for (const auto& h : m.family) fam.push_back(hoop_to_json(h));
  json out = {{"kind", m.is_gaussian() ? "gaussian" : "haar"}, {"family", fam}};
  if (m.is_gaussian()) {
    out["mean"] = vector_to_json(m.mean);
    out["cov"] = matrix_to_json(m.sigma());
    out["r"] = m.cov.r;
    out["mollifier"] = std::string(to_string(m.cov.conv));
    out["tol"] = m.cov.tol;
  }
  return out;
}

inline CylindricalMeasure measure_from_json(const json& j, const std::string& path = "") {
  const json& kind = require(j, "kind", path);
  if (!kind.is_string()) throw FieldError(path + "kind", "expected \"haar\" or \"gaussian\"");
  auto family = family_from_json(require(j, "family", path), path + "family");
  if (kind == "haar") return CylindricalMeasure::haar(std::move(family));
  if (kind != "gaussian") throw FieldError(path + "kind", "expected \"haar\" or \"gaussian\"");
  CovarianceModel cov;
  cov.family = std::move(family);
  cov.r = as_number(require(j, "r", path), path + "r");
  if (!(cov.r > 0.0)) throw FieldError(path + "r", "must be > 0");
  cov.conv = j.contains("mollifier") ? mollifier_from_string(j.at("mollifier").get<std::string>())
                                     : Mollifier::PaperLiteral;
  cov.tol = j.contains("tol") ? as_number(j.at("tol"), path + "tol") : kDefaultTol;
  cov.sigma = matrix_from_json(require(j, "cov", path), path + "cov");
  Eigen::VectorXd mean = j.contains("mean") ? vector_from_json(j.at("mean"), path + "mean")
                                            : Eigen::VectorXd::Zero(cov.sigma.rows());
  try {
    return CylindricalMeasure::gaussian(std::move(cov), mean);
  } catch (const DimensionMismatch& e) {
    throw FieldError(path + "cov", e.what());
  }
}

inline ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("base_hoop")) cfg.base_hoop = hoop_from_json(j.at("base_hoop"), "base_hoop.");
  if (j.contains("r_values")) {
    const json& rv = j.at("r_values");
    if (!rv.is_array() || rv.empty()) throw FieldError("r_values", "expected a non-empty array");
    cfg.r_values.clear();
    for (std::size_t i = 0; i < rv.size(); ++i) {
      const double r = as_number(rv[i], "r_values[" + std::to_string(i) + "]");
      if (!(r > 0.0)) throw FieldError("r_values[" + std::to_string(i) + "]", "must be > 0");
      cfg.r_values.push_back(r);
    }
  }
  if (j.contains("family_size_max")) {
    if (!j.at("family_size_max").is_number_integer() || j.at("family_size_max").get<int>() < 2)
      throw FieldError("family_size_max", "expected an integer >= 2");
    cfg.family_size_max = j.at("family_size_max").get<int>();
  }
  if (j.contains("separation")) {
    cfg.separation = as_number(j.at("separation"), "separation");
    if (!(cfg.separation > 0.0)) throw FieldError("separation", "must be > 0");
  }
  if (j.contains("direction")) cfg.direction = vec3_from_json(j.at("direction"), "direction");
  if (j.contains("draws")) {
    if (!j.at("draws").is_number_integer() || j.at("draws").get<long long>() < 1)
      throw FieldError("draws", "expected an integer >= 1");
    cfg.draws = j.at("draws").get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw FieldError("seed", "expected an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("mollifier")) cfg.conv = mollifier_from_string(j.at("mollifier").get<std::string>());
  if (j.contains("tol")) cfg.tol = as_number(j.at("tol"), "tol");
  return cfg;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_samples_csv(std::ostream& os, const CylSample& s) {
  for (Eigen::Index i = 0; i < s.angles.cols(); ++i) os << (i ? "," : "") << "theta_" << i;
  os << '\n';
  for (Eigen::Index d = 0; d < s.angles.rows(); ++d) {
    for (Eigen::Index i = 0; i < s.angles.cols(); ++i)
      os << (i ? "," : "") << format_double(s.angles(d, i));
    os << '\n';
  }
}

inline void write_decay_csv(std::ostream& os, const DecayTable& t) {
  os << "n,affinity,decorrelation_residual\n";
  for (const auto& row : t)
    os << row.n << ',' << format_double(row.affinity) << ',' << format_double(row.decorrelation_residual)
       << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FieldError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FieldError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace rfock::io
