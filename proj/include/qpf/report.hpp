#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpf/classical.hpp"
#include "qpf/qestimate.hpp"

namespace qpf {

// Minimal JSON writer: insertion-ordered keys, every floating-point numeric
// printed with %.17g so emitted artifacts are byte-deterministic and
// round-trip exactly.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(bool v);
  std::string str() const { return out_; }

 private:
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;

  void separator();
};

std::string format_g17(double v);

std::string classical_report_json(const ClassicalEstimate& estimate, const Schedule& schedule,
                                  double exact_z, std::uint64_t seed);

std::string quantum_report_json(const PipelineResult& result, const Schedule& schedule,
                                std::uint64_t seed,
                                std::uint64_t classical_equivalent_chain_steps);

}  // namespace qpf
