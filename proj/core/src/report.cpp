#include "hardygeo/report.hpp"

#include <fstream>

#include "hardygeo/config.hpp"

namespace hardygeo {

Json domain_json(const DomainSpec& spec) {
  Json j;
  j["kind"] = spec.kind;
  Json params = Json::object();
  for (const auto& kv : spec.num) params[kv.first] = kv.second;
  j["params"] = params;
  if (!spec.levelset.empty()) {
    j["levelset"] = spec.levelset;
    j["bbox_lo"] = {spec.bbox_lo[0], spec.bbox_lo[1], spec.bbox_lo[2]};
    j["bbox_hi"] = {spec.bbox_hi[0], spec.bbox_hi[1], spec.bbox_hi[2]};
  }
  j["dim"] = spec.dim;
  return j;
}

Json grid_json(const Grid& grid) {
  Json j;
  Json dims = Json::array();
  for (int a = 0; a < grid.ndim; ++a) dims.push_back(grid.dims[a]);
  j["dims"] = dims;
  j["spacing"] = grid.h;
  Json origin = Json::array();
  for (int a = 0; a < grid.ndim; ++a) origin.push_back(grid.origin[a]);
  j["origin"] = origin;
  j["measure"] =
      grid.measure == Measure::kCylindrical ? "cylindrical" : "cartesian";
  return j;
}

Json remainder_table_json(const RemainderTable& t) {
  Json j;
  j["lambda_BM"] = t.lambda_BM;
  j["lambda_HHL"] = t.lambda_HHL;
  j["lambda_FMT"] = t.lambda_FMT;
  j["lambda_EL"] = t.lambda_EL;
  j["lambda_AW"] = t.lambda_AW;
  j["lambda_paper"] = t.lambda_paper;
  j["diam"] = t.diam;
  j["volume"] = t.volume;
  j["R_int"] = t.R_int;
  j["sphere_measure"] = t.sphere_measure;
  j["n"] = t.n;
  j["truncation_dependent"] = t.truncation_dependent;
  return j;
}

Json make_report(const DomainSpec& spec, const Grid* grid,
                 const QuotientReport& rep, const Json& tolerances,
                 const Json* lower_bounds, const Json* table) {
  Json j;
  j["domain"] = domain_json(spec);
  if (grid) j["grid"] = grid_json(*grid);
  j["p"] = rep.p;
  if (rep.q > 0.0) j["q"] = rep.q;
  j["kind"] = rep.kind;
  j["value"] = rep.value;
  if (lower_bounds) j["lower_bounds"] = *lower_bounds;
  if (table) j["table"] = *table;
  j["iterations"] = rep.iterations;
  j["seed"] = rep.seed;
  j["tolerances"] = tolerances;
  Json flags = Json::array();
  for (const std::string& f : rep.flags) flags.push_back(f);
  if (rep.grid_resolution > 0) j["grid_resolution"] = rep.grid_resolution;
  if (rep.unconverged) j["unconverged"] = true;
  if (rep.breakdown) j["breakdown"] = true;
  if (rep.upper_bound_only) j["upper_bound_only"] = true;
  j["flags"] = flags;
  return j;
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

void write_report(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  out << dump_report(j);
  if (!out) throw ConfigurationError("write failed for '" + path + "'");
}

}  // namespace hardygeo
