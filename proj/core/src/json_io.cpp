#include "hmhom/json_io.hpp"

#include <stdexcept>

#include <json.hpp>

namespace hmhom {

namespace {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json stats_json(const CompressionStats& stats, int n) {
  return json{{"n", n},
              {"stored", stats.stored_scalars},
              {"dense", stats.dense_scalars},
              {"ratio", stats.ratio},
              {"ranks", {{"min", stats.rank_min}, {"max", stats.rank_max}, {"mean", stats.rank_mean}}},
              {"times",
               {{"assembly_s", stats.assembly_seconds},
                {"factor_s", stats.factor_seconds},
                {"solve_s", stats.solve_seconds}}}};
}

}  // namespace

std::string microstructure_to_json(const Microstructure& ms) {
  json doc;
  if (ms.domain.kind == Domain::Kind::Ball)
    doc["domain"] = {{"kind", "ball"}, {"radius", ms.domain.ball_radius}};
  else
    doc["domain"] = {{"kind", "periodic-cube"}};
  doc["kappa_matrix"] = ms.kappa_matrix;
  doc["spheres"] = json::array();
  for (const Sphere& s : ms.spheres)
    doc["spheres"].push_back(
        {{"center", vec3_to_json(s.center)}, {"radius", s.radius}, {"kappa", s.kappa}});
  return doc.dump(2) + "\n";
}

Microstructure microstructure_from_json(const std::string& text) {
  const json doc = json::parse(text);
  Microstructure ms;
  const std::string kind = doc.at("domain").at("kind").get<std::string>();
  if (kind == "ball")
    ms.domain = Domain::ball(doc.at("domain").at("radius").get<double>());
  else if (kind == "periodic-cube")
    ms.domain = Domain::periodic_cube();
  else
    throw std::invalid_argument("unknown domain kind: " + kind);
  ms.kappa_matrix = doc.at("kappa_matrix").get<double>();
  for (const json& js : doc.at("spheres"))
    ms.spheres.push_back(Sphere{vec3_from_json(js.at("center")), js.at("radius").get<double>(),
                                js.at("kappa").get<double>()});
  ms.validate();
  return ms;
}

std::string mesh_to_json(const TriangleMesh& mesh) {
  json doc;
  doc["vertices"] = json::array();
  for (const Vec3& v : mesh.vertices) doc["vertices"].push_back(vec3_to_json(v));
  doc["triangles"] = json::array();
  for (const auto& t : mesh.triangles) doc["triangles"].push_back(json::array({t[0], t[1], t[2]}));
  doc["owner"] = mesh.owner;
  return doc.dump() + "\n";
}

std::string stats_to_json(const CompressionStats& stats, int n) { return stats_json(stats, n).dump(2) + "\n"; }

std::string eim_results_to_json(const PolarizationField& tau, const EffectiveEstimate& est,
                                const CompressionStats& stats, int n) {
  json doc;
  doc["tau"] = json::array();
  for (const Vec3& t : tau) doc["tau"].push_back(vec3_to_json(t));
  doc["keff"] = json::array();
  for (int i = 0; i < 3; ++i)
    doc["keff"].push_back(json::array({est.tensor(i, 0), est.tensor(i, 1), est.tensor(i, 2)}));
  doc["keff_scalar"] = est.scalar;
  doc["volume_fraction"] = est.volume_fraction;
  doc["stats"] = stats_json(stats, n);
  return doc.dump(2) + "\n";
}

std::string expansion_to_json(const PeriodicGreenExpansion& exp) {
  json doc;
  doc["L"] = exp.degree;
  doc["variant"] =
      exp.variant == PeriodicGreenExpansion::Variant::ImageCorrected ? "image-corrected" : "plain";
  doc["beta"] = std::vector<double>(exp.coeffs.data(), exp.coeffs.data() + exp.coeffs.size());
  doc["gauge_constant"] = exp.gauge_constant;
  doc["fit_defect"] = exp.fit_defect;
  return doc.dump(2) + "\n";
}

PeriodicGreenExpansion expansion_from_json(const std::string& text) {
  const json doc = json::parse(text);
  PeriodicGreenExpansion exp;
  exp.degree = doc.at("L").get<int>();
  const std::string variant = doc.at("variant").get<std::string>();
  if (variant == "image-corrected")
    exp.variant = PeriodicGreenExpansion::Variant::ImageCorrected;
  else if (variant == "plain")
    exp.variant = PeriodicGreenExpansion::Variant::Plain;
  else
    throw std::invalid_argument("unknown expansion variant: " + variant);
  const auto beta = doc.at("beta").get<std::vector<double>>();
  if (static_cast<int>(beta.size()) != (exp.degree + 1) * (exp.degree + 1))
    throw std::invalid_argument("coefficient count does not match the degree");
  exp.coeffs = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  exp.gauge_constant = doc.at("gauge_constant").get<double>();
  exp.fit_defect = doc.value("fit_defect", 0.0);
  return exp;
}

}  // namespace hmhom
