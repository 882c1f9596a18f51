#include "tpca/calibration.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

namespace tpca {

namespace {

using nlohmann::json;

double scale_titi(int n) { return std::pow(double(n), 1.5) * std::sqrt(std::log(double(n))); }
double scale_sdp(int n) { return std::pow(double(n), 0.75) * std::pow(std::log(double(n)), 0.25); }

double lookup(const std::map<int, double>& table, int n, double (*growth)(int), double fallback_const) {
  if (table.empty()) return fallback_const * growth(n);
  auto it = table.find(n);
  if (it != table.end()) return it->second;
  // nearest n, scaled by the growth law
  auto lo = table.lower_bound(n);
  const std::pair<const int, double>* best = nullptr;
  if (lo != table.end()) best = &*lo;
  if (lo != table.begin()) {
    auto prev = std::prev(lo);
    if (!best || std::abs(prev->first - n) < std::abs(best->first - n)) best = &*prev;
  }
  return best->second * growth(n) / growth(best->first);
}

std::mutex g_mutex;
Calibration* g_active = nullptr;

}  // namespace

double Calibration::titi_threshold(int n) const {
  // fallback constant measured on iid noise during development
  return lookup(titi_noise_q99, n, &scale_titi, 2.9);
}

double Calibration::sdp_threshold(int n) const {
  return lookup(sdp_noise_q99, n, &scale_sdp, 1.7);
}

Calibration Calibration::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("calibration: cannot open " + path);
  json j = json::parse(in);
  Calibration c;
  for (auto& [k, v] : j.value("titi_noise_q99", json::object()).items())
    c.titi_noise_q99[std::stoi(k)] = v.get<double>();
  for (auto& [k, v] : j.value("sdp_noise_q99", json::object()).items())
    c.sdp_noise_q99[std::stoi(k)] = v.get<double>();
  auto lb = j.value("lower_bound", json::object());
  c.lb3_corr_coeff = lb.value("lb3_corr_coeff", c.lb3_corr_coeff);
  c.lb3_spec_coeff = lb.value("lb3_spec_coeff", c.lb3_spec_coeff);
  c.lb3_trace_coeff = lb.value("lb3_trace_coeff", c.lb3_trace_coeff);
  c.lb3_delta_cap = lb.value("lb3_delta_cap", c.lb3_delta_cap);
  c.lb4_corr_coeff = lb.value("lb4_corr_coeff", c.lb4_corr_coeff);
  c.lb4_spec_coeff = lb.value("lb4_spec_coeff", c.lb4_spec_coeff);
  c.lb4_trace_coeff = lb.value("lb4_trace_coeff", c.lb4_trace_coeff);
  c.lb4_delta_cap = lb.value("lb4_delta_cap", c.lb4_delta_cap);
  c.lb3_lambda_mult = lb.value("lb3_lambda_mult", c.lb3_lambda_mult);
  c.lb4_lambda_mult = lb.value("lb4_lambda_mult", c.lb4_lambda_mult);
  return c;
}

void Calibration::save(const std::string& path) const {
  json j;
  for (auto& [n, v] : titi_noise_q99) j["titi_noise_q99"][std::to_string(n)] = v;
  for (auto& [n, v] : sdp_noise_q99) j["sdp_noise_q99"][std::to_string(n)] = v;
  j["lower_bound"] = {{"lb3_corr_coeff", lb3_corr_coeff}, {"lb3_spec_coeff", lb3_spec_coeff},
                      {"lb3_trace_coeff", lb3_trace_coeff}, {"lb3_delta_cap", lb3_delta_cap},
                      {"lb4_corr_coeff", lb4_corr_coeff}, {"lb4_spec_coeff", lb4_spec_coeff},
                      {"lb4_trace_coeff", lb4_trace_coeff}, {"lb4_delta_cap", lb4_delta_cap},
                      {"lb3_lambda_mult", lb3_lambda_mult}, {"lb4_lambda_mult", lb4_lambda_mult}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("calibration: cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string Calibration::default_path() {
  if (const char* env = std::getenv("TPCA_CALIBRATION")) return env;
#ifdef TPCA_SOURCE_DIR
  return std::string(TPCA_SOURCE_DIR) + "/data/calibration.json";
#else
  return "data/calibration.json";
#endif
}

const Calibration& Calibration::get() {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!g_active) {
    g_active = new Calibration();
    try {
      *g_active = load(default_path());
    } catch (const std::exception&) {
      // built-in fallback constants stay in place
    }
  }
  return *g_active;
}

void Calibration::set(const Calibration& c) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!g_active) g_active = new Calibration();
  *g_active = c;
}

}  // namespace tpca
