#include "acbandit/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "acbandit/errors.hpp"

namespace acb {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

Vec parse_vector(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  std::vector<double> vals;
  std::string tok;
  while (is >> tok) vals.push_back(parse_double(key, tok));
  if (vals.empty()) throw config_error("config key '" + key + "': expected numbers");
  Vec out(static_cast<Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) out(static_cast<Index>(i)) = vals[i];
  return out;
}

struct ParseState {
  bool sign_given = false;
  bool tau_given = false;
  bool alpha_nl_given = false;
  bool kind_given = false;
  bool t_given = false;
};

using Setter = std::function<void(Experiment&, ParseState&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env.kind",
       [](Experiment& e, ParseState& st, const std::string& key, const std::string& v) {
         if (v == "iid") e.env.kind = EnvKind::iid;
         else if (v == "ar1") e.env.kind = EnvKind::ar1;
         else if (v == "burden") e.env.kind = EnvKind::burden;
         else if (v == "nonlinear") e.env.kind = EnvKind::nonlinear;
         else if (v == "toy_binary") e.env.kind = EnvKind::toy_binary;
         else throw config_error("config key '" + key + "': unknown environment kind '" + v + "'");
         st.kind_given = true;
       }},
      {"env.tau",
       [](Experiment& e, ParseState& st, const std::string& key, const std::string& v) {
         e.env.tau = parse_double(key, v);
         st.tau_given = true;
       }},
      {"env.alpha_nl",
       [](Experiment& e, ParseState& st, const std::string& key, const std::string& v) {
         e.env.alpha_nl = parse_double(key, v);
         st.alpha_nl_given = true;
       }},
      {"env.sign",
       [](Experiment& e, ParseState& st, const std::string& key, const std::string& v) {
         if (v == "cost") e.env.sign = OutcomeSign::cost;
         else if (v == "reward") e.env.sign = OutcomeSign::reward;
         else throw config_error("config key '" + key + "': expected cost or reward");
         st.sign_given = true;
       }},
      {"constraint.p0",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.p0 = parse_double(key, v);
       }},
      {"constraint.alpha",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.alpha = parse_double(key, v);
       }},
      {"constraint.lambda_mode",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         if (v == "online" || v == "online_search") e.run.lambda_mode = LambdaMode::online_search;
         else if (v == "fixed") e.run.lambda_mode = LambdaMode::fixed;
         else throw config_error("config key '" + key + "': expected online or fixed");
       }},
      {"constraint.lambda",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.lambda_fixed = parse_double(key, v);
       }},
      {"run.T",
       [](Experiment& e, ParseState& st, const std::string& key, const std::string& v) {
         e.run.T = static_cast<int>(parse_int(key, v));
         st.t_given = true;
       }},
      {"run.burn_in",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.burn_in = static_cast<int>(parse_int(key, v));
       }},
      {"run.clip",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.clip = parse_bool(key, v);
       }},
      {"run.clip_bound",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.clip_bound = parse_double(key, v);
       }},
      {"run.zeta",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.zeta = parse_double(key, v);
       }},
      {"run.seed",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.seed = static_cast<std::uint64_t>(parse_int(key, v));
       }},
      {"run.replicates",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.replicate_count = static_cast<int>(parse_int(key, v));
       }},
      {"inference.bootstrap_B",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.bootstrap_B = static_cast<int>(parse_int(key, v));
       }},
      {"inference.level",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.run.ci_level = parse_double(key, v);
       }},
      {"oracle.pinned",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.oracle.pinned = parse_bool(key, v);
       }},
      {"oracle.lambda_star",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.oracle.lambda_star = parse_double(key, v);
       }},
      {"oracle.theta_star",
       [](Experiment& e, ParseState&, const std::string& key, const std::string& v) {
         e.oracle.theta_star = parse_vector(key, v);
       }},
      {"output.dir",
       [](Experiment& e, ParseState&, const std::string&, const std::string& v) {
         e.output_dir = v;
       }},
  };
  return table;
}

std::string env_var_name(const std::string& dotted_key) {
  std::string name = "ACB_";
  for (char c : dotted_key) {
    name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

void apply_env_overrides_impl(Experiment& exp, ParseState& st) {
  for (const auto& [key, setter] : setters()) {
    if (const char* v = std::getenv(env_var_name(key).c_str())) {
      setter(exp, st, key, trim(v));
    }
  }
}

void finalize(Experiment& exp, const ParseState& st) {
  if (!st.kind_given) throw config_error("config key 'env.kind' is required");
  if (!st.t_given) throw config_error("config key 'run.T' is required");
  if (!st.sign_given) {
    exp.env.sign = exp.env.kind == EnvKind::toy_binary ? OutcomeSign::reward : OutcomeSign::cost;
  }
  if (st.tau_given && exp.env.kind != EnvKind::burden) {
    throw config_error("config key 'env.tau' is only valid for the burden environment");
  }
  if (st.alpha_nl_given && exp.env.kind != EnvKind::nonlinear) {
    throw config_error("config key 'env.alpha_nl' is only valid for the nonlinear environment");
  }
  if (exp.env.tau < 0.0) throw config_error("config key 'env.tau' must be >= 0");
  if (exp.env.alpha_nl < 0.0 || exp.env.alpha_nl > 1.0) {
    throw config_error("config key 'env.alpha_nl' must lie in [0, 1]");
  }
  if (exp.oracle.pinned) {
    if (exp.oracle.theta_star.size() != exp.env.features().p()) {
      throw config_error("config key 'oracle.theta_star' must have length " +
                         std::to_string(exp.env.features().p()));
    }
  }
  if (exp.run.T < exp.run.burn_in) {
    throw config_error("config key 'run.T' must be >= run.burn_in");
  }
  exp.run.validate();
}

}  // namespace

Experiment parse_experiment(const std::string& text) {
  Experiment exp;
  ParseState st;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("config line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw config_error("unknown config key '" + key + "'");
    }
    it->second(exp, st, key, value);
  }
  apply_env_overrides_impl(exp, st);
  finalize(exp, st);
  return exp;
}

void apply_env_overrides(Experiment& exp) {
  ParseState st;
  st.kind_given = true;
  st.t_given = true;
  apply_env_overrides_impl(exp, st);
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_experiment(os.str());
}

}  // namespace acb
