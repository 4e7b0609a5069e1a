#include "rbm3q/model.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "rbm3q/errors.hpp"

#include <json.hpp>

namespace rbm3q {

void require_elliptic(const ModelParams& p) {
  if (!(p.elliptic_gap() > 0.0)) {
    std::ostringstream os;
    os << "covariance is not elliptic: sigma1*sigma2 - rho^2 = "
       << p.elliptic_gap();
    throw NonElliptic(os.str());
  }
}

RecurrenceReport validate(const ModelParams& p) {
  require_elliptic(p);
  RecurrenceReport r;
  r.drift1_negative = p.mu1 < 0.0;
  r.drift2_negative = p.mu2 < 0.0;
  r.reflection1 = p.mu1 - p.r1 * p.mu2 > 0.0;
  r.reflection2 = p.mu2 - p.r2 * p.mu1 > 0.0;
  r.recurrent =
      r.drift1_negative && r.drift2_negative && r.reflection1 && r.reflection2;
  return r;
}

bool is_symmetric(const ModelParams& p) {
  return p.mu1 == p.mu2 && p.sigma1 == p.sigma2 && p.r1 == p.r2;
}

WedgeAngles wedge_angles(const ModelParams& p) {
  if (!is_symmetric(p)) {
    throw NotSymmetric("wedge_angles requires mu1=mu2, sigma1=sigma2, r1=r2");
  }
  require_elliptic(p);
  const double sigma = p.sigma1;
  const double r = p.r1;
  WedgeAngles w;
  w.beta = 2.0 * M_PI - std::acos(-p.rho / sigma);
  w.beta_tilde = 0.5 * w.beta;
  w.epsilon = 0.5 * M_PI;
  const double den = r + std::cos(w.beta);
  if (den == 0.0) {
    w.delta = 0.5 * M_PI;  // tan(delta) = inf
  } else {
    double d = std::atan2(std::sin(w.beta), den);
    if (d <= 0.0) d += M_PI;  // reflection angle lives in (0, pi)
    w.delta = d;
  }
  return w;
}

namespace {

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j;
  j["mu"] = {p.mu1, p.mu2};
  j["sigma"] = {p.sigma1, p.sigma2};
  j["rho"] = p.rho;
  j["refl"] = {p.r1, p.r2};
  return j;
}

}  // namespace

ModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open parameter file: " + path);
  nlohmann::json j;
  in >> j;
  ModelParams p;
  p.mu1 = j.at("mu").at(0).get<double>();
  p.mu2 = j.at("mu").at(1).get<double>();
  p.sigma1 = j.at("sigma").at(0).get<double>();
  p.sigma2 = j.at("sigma").at(1).get<double>();
  p.rho = j.at("rho").get<double>();
  p.r1 = j.at("refl").at(0).get<double>();
  p.r2 = j.at("refl").at(1).get<double>();
  return p;
}

void save_params(const ModelParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write parameter file: " + path);
  out << to_json(p).dump(2) << "\n";
}

std::string params_json(const ModelParams& p) { return to_json(p).dump(); }

std::uint64_t params_hash(const ModelParams& p) {
  // nlohmann::json orders keys, so dump() is canonical.
  const std::string s = to_json(p).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rbm3q
