#pragma once

#include <array>
#include <string>

#include "hmhom/eim.hpp"
#include "hmhom/geometry.hpp"
#include "hmhom/hmatrix.hpp"
#include "hmhom/mesh.hpp"
#include "hmhom/periodic_green.hpp"

namespace hmhom {

// Microstructure document:
// {"domain": {"kind": "ball"|"periodic-cube", "radius": ...},
//  "kappa_matrix": ..., "spheres": [{"center": [x,y,z], "radius": r, "kappa": k}]}
std::string microstructure_to_json(const Microstructure& ms);
Microstructure microstructure_from_json(const std::string& text);

// {"vertices": [[x,y,z]...], "triangles": [[a,b,c]...], "owner": [...]}
std::string mesh_to_json(const TriangleMesh& mesh);

// Flat record {"n", "stored", "dense", "ratio",
//              "ranks": {"min","max","mean"},
//              "times": {"assembly_s","factor_s","solve_s"}}
std::string stats_to_json(const CompressionStats& stats, int n);

// {"tau": [[3]...], "keff": [[3]x3], "stats": {...}}
std::string eim_results_to_json(const PolarizationField& tau, const EffectiveEstimate& est,
                                const CompressionStats& stats, int n);

// {"L", "variant", "beta": [...], "gauge_constant", "fit_defect"}
std::string expansion_to_json(const PeriodicGreenExpansion& exp);
PeriodicGreenExpansion expansion_from_json(const std::string& text);

}  // namespace hmhom
