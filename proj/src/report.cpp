#include "pestov/report.hpp"

#include <cmath>

namespace pestov {

namespace {

/// JSON has no representation for non-finite numbers.
Json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

bool CheckRecord::ok() const {
  if (expect_fail) return verdict == Verdict::kFail;
  return verdict != Verdict::kFail;
}

void Report::append(const Report& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
}

bool Report::ok() const {
  for (const auto& r : records) {
    if (!r.ok()) return false;
  }
  return true;
}

Json to_json(const CheckRecord& r) {
  Json j;
  j["identity_id"] = r.identity_id;
  j["manifold"] = r.manifold;
  j["k"] = r.k;
  j["indices"] = r.indices;
  j["fd_step"] = number(r.fd_step);
  j["residual"] = number(r.residual);
  j["scale"] = number(r.scale);
  j["n_samples"] = r.n_samples;
  j["stderr"] = number(r.stderr_);
  j["verdict"] = to_string(r.verdict);
  j["seed"] = r.seed;
  if (r.expect_fail) j["expected"] = "FAIL";
  for (const auto& [key, value] : r.extras.items()) {
    j[key] = value.is_number_float() ? number(value.get<double>()) : value;
  }
  return j;
}

Json Report::to_json() const {
  Json out;
  out["config"] = config;
  Json list = Json::array();
  int pass = 0, fail = 0, skip = 0, floor = 0, unexpected = 0;
  for (const auto& r : records) {
    list.push_back(pestov::to_json(r));
    switch (r.verdict) {
      case Verdict::kPass: ++pass; break;
      case Verdict::kFail: ++fail; break;
      case Verdict::kSkip: ++skip; break;
      case Verdict::kNoiseFloor: ++floor; break;
    }
    if (!r.ok()) ++unexpected;
  }
  out["records"] = list;
  out["summary"] = {{"total", records.size()}, {"pass", pass},           {"fail", fail},
                    {"skip", skip},            {"noise_floor", floor},   {"unexpected", unexpected},
                    {"ok", unexpected == 0}};
  return out;
}

std::string Report::dump() const { return to_json().dump(2); }

}  // namespace pestov
