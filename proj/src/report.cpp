#include "qpf/report.hpp"

#include <cmath>
#include <cstdio>

#include "qpf/errors.hpp"

namespace qpf {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_in_scope_.empty()) {
    if (!first_in_scope_.back()) out_ += ',';
    first_in_scope_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  first_in_scope_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_in_scope_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  first_in_scope_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_in_scope_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separator();
  out_ += '"';
  out_ += k;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  if (!std::isfinite(v)) throw NumericError("cannot serialize non-finite value");
  out_ += format_g17(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      default: out_ += c;
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

std::string classical_report_json(const ClassicalEstimate& estimate, const Schedule& schedule,
                                  double exact_z, std::uint64_t seed) {
  JsonWriter w;
  w.begin_object();
  w.key("scheme").value(std::string("classical"));
  w.key("estimate").value(estimate.value);
  w.key("exact_z").value(exact_z);
  w.key("relative_error").value(estimate.value / exact_z - 1.0);
  w.key("epsilon").value(estimate.config.epsilon);
  w.key("levels").value(static_cast<std::uint64_t>(estimate.config.levels));
  w.key("samples_per_ratio").value(estimate.config.samples_per_ratio);
  w.key("variation_budget").value(estimate.config.variation_budget);
  w.key("betas").begin_array();
  for (double b : schedule.betas()) w.value(b);
  w.end_array();
  w.key("per_ratio_means").begin_array();
  for (double m : estimate.ratio_means) w.value(m);
  w.end_array();
  w.key("burn_in").begin_array();
  for (std::uint64_t b : estimate.burn_in) w.value(b);
  w.end_array();
  w.key("total_chain_steps").value(estimate.total_chain_steps);
  w.key("seed").value(seed);
  w.end_object();
  return w.str() + "\n";
}

std::string quantum_report_json(const PipelineResult& result, const Schedule& schedule,
                                std::uint64_t seed,
                                std::uint64_t classical_equivalent_chain_steps) {
  JsonWriter w;
  w.begin_object();
  w.key("scheme").value(std::string("quantum"));
  w.key("mode").value(std::string(result.config.mode == SampleMode::exact ? "perfect" : "walk"));
  w.key("estimate").value(result.estimate);
  w.key("exact_z").value(result.exact_z);
  w.key("relative_error").value(result.estimate / result.exact_z - 1.0);
  w.key("config").begin_object();
  w.key("epsilon").value(result.config.epsilon);
  w.key("levels").value(static_cast<std::uint64_t>(result.config.levels));
  w.key("eps_pe").value(result.config.eps_pe);
  w.key("delta_boost").value(result.config.delta_boost);
  w.key("p_f").value(result.config.p_f);
  w.key("eps_s").value(result.config.eps_s);
  w.key("eps_r").value(result.config.eps_r);
  w.key("prep_depth").value(result.config.prep_depth);
  w.end_object();
  w.key("betas").begin_array();
  for (double b : schedule.betas()) w.value(b);
  w.end_array();
  w.key("per_level").begin_array();
  for (const auto& lvl : result.levels) {
    w.begin_object();
    w.key("alpha_exact").value(lvl.alpha_exact);
    w.key("estimate").value(lvl.estimate);
    w.key("within_band_mass").value(lvl.within_band_mass);
    w.key("t").value(lvl.t);
    w.key("median_runs").value(lvl.median_runs);
    if (result.config.mode == SampleMode::walk) {
      w.key("prep_deviation").value(lvl.prep_deviation);
      w.key("reflection_accumulated").value(lvl.reflection_accumulated);
    }
    w.end_object();
  }
  w.end_array();
  w.key("ledger").begin_object();
  w.key("per_level").begin_array();
  for (const auto& lvl : result.ledger.per_level) {
    w.begin_object();
    w.key("walk_ops").value(lvl.walk_ops);
    w.key("reflection_ops").value(lvl.reflection_ops);
    w.key("samples_prepared").value(lvl.samples_prepared);
    w.key("chain_steps").value(lvl.chain_steps);
    w.end_object();
  }
  w.end_array();
  w.key("total").begin_object();
  w.key("walk_ops").value(result.ledger.total.walk_ops);
  w.key("reflection_ops").value(result.ledger.total.reflection_ops);
  w.key("samples_prepared").value(result.ledger.total.samples_prepared);
  w.key("chain_steps").value(result.ledger.total.chain_steps);
  w.end_object();
  w.key("classical_equivalent_chain_steps").value(classical_equivalent_chain_steps);
  w.end_object();
  w.key("seed").value(seed);
  w.end_object();
  return w.str() + "\n";
}

}  // namespace qpf
