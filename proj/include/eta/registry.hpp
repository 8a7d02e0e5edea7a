#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eta/twisted.hpp"

namespace eta {

// One verifiable identity: a list of sub-identities built per trial from a
// seeded random environment (metric, twist, auxiliary function). Operator
// sub-identities are checked on random pure-type forms in every applicable
// bidegree; form sub-identities are single exact equalities of forms.
struct CaseEnv {
  int n = 2;
  int deg_bound = 1;
  uint64_t seed = 0;  // already mixed with case id and trial index
  std::shared_ptr<MetricCtx> metric;
  std::shared_ptr<Twist> twist;
  RatFun rho;  // auxiliary real function for function-coefficient identities
  bool heavy = false;  // sparse trial forms for the expensive cases

  OpEnv env() const { return OpEnv{metric.get(), twist.get()}; }
  OpCtx ctx() const { return OpCtx{metric.get(), twist.get()}; }
};

struct SubCheck {
  std::string name;
  OpPtr lhs, rhs;                          // operator identity ...
  std::optional<std::pair<Form, Form>> forms;  // ... or a form identity

  SubCheck(std::string nm, OpPtr l, OpPtr r)
      : name(std::move(nm)), lhs(std::move(l)), rhs(std::move(r)) {}
  SubCheck(std::string nm, Form l, Form r)
      : name(std::move(nm)), forms(std::make_pair(std::move(l), std::move(r))) {}
};

struct IdentityCase {
  std::string id;
  std::string section;    // twist | commutation | bidegree | special | appendix
  std::string statement;  // the identity, in ASCII math
  std::string metric_req;    // "generic" | "any"
  std::string twist_req;     // "generic" | "constant-ok" | "none"
  std::string special_metric;  // "none" | "gamma_eta"
  bool heavy = false;
  std::function<std::vector<SubCheck>(const CaseEnv&)> build;
};

struct Counterexample {
  std::string sub_check;
  uint64_t seed = 0;
  int trial = 0;
  int p = -1, q = -1;  // -1 for form identities
  std::string residual_component;
};

struct IdentityReport {
  std::string id;
  std::string statement;
  int trials = 0;
  int checks_run = 0;
  bool pass = true;
  double millis = 0;
  std::optional<Counterexample> counterexample;
};

struct SuiteReport {
  int n = 0;
  int trials = 0;
  uint64_t seed = 0;
  int degree_bound = 1;
  std::string metric_override;  // empty | "flat"
  std::vector<IdentityReport> cases;
  bool all_pass() const {
    for (auto& c : cases)
      if (!c.pass) return false;
    return true;
  }
};

// registry access
const std::vector<IdentityCase>& all_identities();

struct RegistryFilter {
  std::string id, section, metric, twist, special_metric;
};
RegistryFilter parse_filter(const std::vector<std::string>& kv);
std::vector<const IdentityCase*> list_identities(const RegistryFilter& f);

struct CheckOptions {
  int trials = 5;
  uint64_t seed = 1;
  int n = 2;
  int deg_bound = 1;
  std::string metric_override;  // "" or "flat"
  int max_setup_retries = 5;
};

IdentityReport check_identity(const IdentityCase& c, const CheckOptions& opt);

enum class ExecPolicy { Serial, OpenMP };

SuiteReport run_suite(const RegistryFilter& filter, const CheckOptions& opt,
                      ExecPolicy policy = ExecPolicy::OpenMP);

// registry content fingerprint for the result cache
std::string registry_fingerprint();

}  // namespace eta
