#pragma once

// Check records and their JSON serialization (stable key order, no
// timestamps, so identical runs give identical bytes).

#include "pestov/identities.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pestov {

using Json = nlohmann::ordered_json;

struct CheckRecord {
  std::string identity_id;
  std::string manifold;
  int k = 0;
  /// 1-based identity indices.
  std::vector<int> indices;
  double fd_step = 0.0;
  double residual = 0.0;
  double scale = 0.0;
  long n_samples = 0;
  double stderr_ = 0.0;
  Verdict verdict = Verdict::kFail;
  std::uint64_t seed = 0;
  /// Negative controls are expected to FAIL.
  bool expect_fail = false;
  /// Additional fields: function name, convergence order, notes.
  Json extras = Json::object();

  /// True when the verdict is what the check expects.
  bool ok() const;
};

struct Report {
  Json config = Json::object();
  std::vector<CheckRecord> records;

  void append(const Report& other);
  bool ok() const;
  Json to_json() const;
  std::string dump() const;
};

Json to_json(const CheckRecord& r);

}  // namespace pestov
