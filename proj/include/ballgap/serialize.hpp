#pragma once

#include "ballgap/compose.hpp"
#include "ballgap/polyseries.hpp"
#include "ballgap/sphere.hpp"
#include "ballgap/weights.hpp"
#include "ballgap/witness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ballgap::io {

using json = nlohmann::json;

// Weight config block:
//   {"kind":"power","gamma":0.5,"alpha":0.4,"beta":0.6,"delta0":0.5}
//   {"kind":"table","points":[[r,mu],...],"alpha":...,"beta":...,"delta0":...}
json weight_to_json(const NormalWeight& w);
NormalWeight weight_from_json(const json& j);

// Separated-set file: dim, separation, seed, flags and a flat array of
// 2n-real rows. Doubles are written in shortest round-trip form, so the
// round trip is bit exact.
json separated_set_to_json(const SeparatedSet& s);
SeparatedSet separated_set_from_json(const json& j);
void save_separated_set(const SeparatedSet& s, const std::filesystem::path& path);
SeparatedSet load_separated_set(const std::filesystem::path& path);

// Gap series config: terms as {degree, centers:[[2n reals]...],
// coeffs:[[re,im]...], supnorm_hint?}, optional gap_ratio.
json series_to_json(const GapSeries& f, size_t cdim);
GapSeries series_from_json(const json& j, size_t* cdim_out = nullptr);

// Symbol config: {"u":{"kind":"const","value":1},
//                 "phi":{"kind":"scale","s":0.5}} and polynomial analogues.
Evaluable evaluable_from_json(const json& j, size_t cdim);
PhiMap phi_from_json(const json& j, size_t cdim);

json witness_params_to_json(const WitnessParams& p);
WitnessParams witness_params_from_json(const json& j);

// Family directory: params.json + manifest.json + one point-set file per
// constructed (kind, j, v) level.
void save_witness_family(const WitnessFamily& fam, const std::filesystem::path& dir);
WitnessFamily load_witness_family(const std::filesystem::path& dir);

}  // namespace ballgap::io
