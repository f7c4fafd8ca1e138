#include "mixred/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mixred/common.hpp"

namespace mixred {

using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("bad json in " + path + ": " + e.what());
  }
  return j;
}

static void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << body;
  if (!out) throw Error("write failed for " + path);
}

static Covariance covariance_from_json(std::size_t dim, const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  Vec data = j.at("data").get<Vec>();
  if (kind == "iso") {
    if (data.size() != 1) throw Error("iso covariance needs one value");
    return Covariance::iso(dim, data[0]);
  }
  if (kind == "diag") {
    if (data.size() != dim) throw Error("diag covariance needs dim values");
    return Covariance::diagonal(std::move(data));
  }
  if (kind == "full") return Covariance::full(dim, std::move(data));
  throw Error("unknown covariance kind: " + kind);
}

static json covariance_to_json(const Covariance& c) {
  json j;
  switch (c.kind) {
    case CovKind::Iso:
      j["kind"] = "iso";
      break;
    case CovKind::Diag:
      j["kind"] = "diag";
      break;
    default:
      j["kind"] = "full";
      break;
  }
  j["data"] = c.data;
  return j;
}

Mixture load_mixture_json(const std::string& path) {
  json j = load_json_file(path);
  Mixture m;
  try {
    m.dim = j.at("dim").get<std::size_t>();
    m.coeffs = j.at("coeffs").get<Vec>();
    for (const auto& ja : j.at("atoms")) {
      Vec mu = ja.at("mu").get<Vec>();
      if (mu.size() != m.dim) throw Error("atom mu has wrong dimension");
      m.atoms.push_back(make_atom(std::move(mu), covariance_from_json(m.dim, ja.at("cov"))));
    }
  } catch (const json::exception& e) {
    throw Error("bad mixture in " + path + ": " + e.what());
  }
  if (m.coeffs.size() != m.atoms.size())
    throw Error("mixture in " + path + ": coeffs and atoms disagree");
  return m;
}

void save_mixture_json(const Mixture& m, const std::string& path) {
  json j;
  j["dim"] = m.dim;
  j["coeffs"] = m.coeffs;
  json atoms = json::array();
  for (const auto& a : m.atoms) {
    json ja;
    ja["mu"] = a.mu;
    ja["cov"] = covariance_to_json(a.cov);
    atoms.push_back(std::move(ja));
  }
  j["atoms"] = std::move(atoms);
  write_text_file(path, j.dump(2) + "\n");
}

KernelExpansion load_expansion_json(const std::string& path) {
  json j = load_json_file(path);
  KernelExpansion e;
  try {
    e.d = j.at("d").get<std::size_t>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "power")
      e.kind = ExpansionKind::Power;
    else if (kind == "helmholtz")
      e.kind = ExpansionKind::Helmholtz;
    else
      throw Error("unknown expansion kind: " + kind);
    e.k = j.at("k").get<double>();
    e.h = j.at("h").get<double>();
    e.weights = j.at("weights").get<Vec>();
    e.exponents = j.at("exponents").get<Vec>();
    e.delta = j.at("delta").get<double>();
    e.r_max = j.at("R").get<double>();
    e.eps = j.at("eps").get<double>();
  } catch (const json::exception& ex) {
    throw Error("bad expansion in " + path + ": " + ex.what());
  }
  if (e.weights.size() != e.exponents.size())
    throw Error("expansion in " + path + ": weights and exponents disagree");
  return e;
}

void save_expansion_json(const KernelExpansion& e, const std::string& path) {
  json j;
  j["d"] = e.d;
  j["kind"] = e.kind == ExpansionKind::Power ? "power" : "helmholtz";
  j["k"] = e.k;
  j["h"] = e.h;
  j["weights"] = e.weights;
  j["exponents"] = e.exponents;
  j["delta"] = e.delta;
  j["R"] = e.r_max;
  j["eps"] = e.eps;
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<Vec> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<Vec> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vec row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error("bad number in " + path + ": " + cell);
      }
    }
    if (!points.empty() && row.size() != points.front().size())
      throw Error("ragged rows in " + path);
    points.push_back(std::move(row));
  }
  if (points.empty()) throw EmptyPointSet("no points in " + path);
  return points;
}

void save_points_csv(const std::vector<Vec>& points, const std::string& path) {
  std::ostringstream out;
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << fmt_g17(p[j]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace mixred
