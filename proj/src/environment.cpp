#include "nvholo/environment.hpp"

#include <stdexcept>
#include <string>

namespace nvholo {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

// JSON has no infinity; null (or a missing key) stands for "no relaxation".
double time_or_inf(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::infinity();
  return j.at(key).get<double>();
}

nlohmann::json inf_or_time(double t) { return std::isinf(t) ? nlohmann::json(nullptr) : nlohmann::json(t); }

}  // namespace

void FineStructureParams::validate() const {
  require_finite(lambda_par, "lambda_par");
  require_finite(d_es_par, "d_es_par");
  require_finite(d_es_perp, "d_es_perp");
  require_finite(d_gs, "d_gs");
  if (d_gs <= 0.0) throw std::invalid_argument("d_gs must be positive");
}

void StrainParams::validate() const {
  require_finite(e_x, "e_x");
  require_finite(e_y, "e_y");
}

std::string_view to_string(DephasingMode m) {
  return m == DephasingMode::OpticalDephasing ? "optical_dephasing" : "ground_dephasing";
}

DephasingMode dephasing_mode_from_string(std::string_view s) {
  if (s == "optical_dephasing") return DephasingMode::OpticalDephasing;
  if (s == "ground_dephasing") return DephasingMode::GroundDephasing;
  throw std::invalid_argument("unknown channel_mode: " + std::string(s));
}

double RelaxationParams::pure_dephasing_rate() const {
  if (mode == DephasingMode::OpticalDephasing) return 2.0 * (1.0 / t2_star_ns - 1.0 / (2.0 * t1_ns));
  return 1.0 / (2.0 * t2_star_ns);
}

void RelaxationParams::validate() const {
  if (!(t1_ns > 0.0)) throw std::invalid_argument("t1 must be positive");
  if (!(t2_star_ns > 0.0)) throw std::invalid_argument("t2_star must be positive");
  if (mode == DephasingMode::OpticalDephasing && pure_dephasing_rate() < -1e-15) {
    throw std::invalid_argument("t2_star exceeds 2*t1: negative pure-dephasing rate");
  }
}

void NVOrientation::validate() const {
  require_finite(tilt, "tilt");
  require_finite(azimuth, "azimuth");
  require_finite(lab_reference, "lab_reference");
  if (tilt < 0.0 || tilt > std::acos(0.0) + 1e-12) throw std::invalid_argument("tilt must lie in [0, pi/2]");
}

NVEnvironment NVEnvironment::sample_defaults() {
  NVEnvironment env;
  env.strain = {-1.2, -1.8};
  return env;
}

NVEnvironment NVEnvironment::ideal() {
  NVEnvironment env;
  env.strain = {0.0, 0.0};
  env.relaxation = RelaxationParams::none();
  env.orientation = NVOrientation::aligned();
  return env;
}

void NVEnvironment::validate() const {
  fine.validate();
  strain.validate();
  relaxation.validate();
  orientation.validate();
}

void to_json(nlohmann::json& j, const FineStructureParams& p) {
  j = {{"lambda_par", p.lambda_par}, {"d_es_par", p.d_es_par}, {"d_es_perp", p.d_es_perp}, {"d_gs", p.d_gs}};
}

void from_json(const nlohmann::json& j, FineStructureParams& p) {
  FineStructureParams d;
  p.lambda_par = j.value("lambda_par", d.lambda_par);
  p.d_es_par = j.value("d_es_par", d.d_es_par);
  p.d_es_perp = j.value("d_es_perp", d.d_es_perp);
  p.d_gs = j.value("d_gs", d.d_gs);
}

void to_json(nlohmann::json& j, const StrainParams& p) { j = {{"e_x", p.e_x}, {"e_y", p.e_y}}; }

void from_json(const nlohmann::json& j, StrainParams& p) {
  p.e_x = j.value("e_x", 0.0);
  p.e_y = j.value("e_y", 0.0);
}

void to_json(nlohmann::json& j, const RelaxationParams& p) {
  j = {{"t1_ns", inf_or_time(p.t1_ns)},
       {"t2_star_ns", inf_or_time(p.t2_star_ns)},
       {"channel_mode", std::string(to_string(p.mode))}};
}

void from_json(const nlohmann::json& j, RelaxationParams& p) {
  p.t1_ns = time_or_inf(j, "t1_ns");
  p.t2_star_ns = time_or_inf(j, "t2_star_ns");
  p.mode = dephasing_mode_from_string(j.value("channel_mode", std::string("ground_dephasing")));
}

void to_json(nlohmann::json& j, const NVOrientation& p) {
  j = {{"tilt_rad", p.tilt}, {"azimuth_rad", p.azimuth}, {"lab_reference_rad", p.lab_reference}};
}

void from_json(const nlohmann::json& j, NVOrientation& p) {
  NVOrientation d;
  p.tilt = j.value("tilt_rad", d.tilt);
  p.azimuth = j.value("azimuth_rad", d.azimuth);
  p.lab_reference = j.value("lab_reference_rad", d.lab_reference);
}

void to_json(nlohmann::json& j, const NVEnvironment& p) {
  j = {{"fine_structure", p.fine}, {"strain", p.strain}, {"relaxation", p.relaxation}, {"orientation", p.orientation}};
}

void from_json(const nlohmann::json& j, NVEnvironment& p) {
  p = NVEnvironment{};
  if (j.contains("fine_structure")) p.fine = j.at("fine_structure").get<FineStructureParams>();
  if (j.contains("strain")) p.strain = j.at("strain").get<StrainParams>();
  if (j.contains("relaxation")) p.relaxation = j.at("relaxation").get<RelaxationParams>();
  if (j.contains("orientation")) p.orientation = j.at("orientation").get<NVOrientation>();
}

}  // namespace nvholo
