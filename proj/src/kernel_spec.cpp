#include <cctype>
#include <charconv>
#include <map>
#include <string>
#include <vector>

#include "gpk/error.hpp"
#include "gpk/kernels.hpp"

namespace gpk {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits on commas at parenthesis depth zero.
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw InputError("unbalanced parentheses in kernel spec: " + s);
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw InputError("unbalanced parentheses in kernel spec: " + s);
  parts.push_back(trim(cur));
  return parts;
}

double parse_number(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw InputError("invalid number '" + s + "' in " + context);
  return v;
}

int parse_int(const std::string& s, const std::string& context) {
  const double v = parse_number(s, context);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw InputError("expected an integer, got '" + s + "' in " + context);
  }
  return static_cast<int>(v);
}

std::map<std::string, std::string> parse_params(const std::string& body, const std::string& context) {
  std::map<std::string, std::string> out;
  if (trim(body).empty()) return out;
  for (const auto& item : split_top_level(body)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("expected key=value in " + context + ", got '" + item + "'");
    out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return out;
}

const std::string& require_param(const std::map<std::string, std::string>& params, const std::string& key,
                                 const std::string& context) {
  auto it = params.find(key);
  if (it == params.end()) throw InputError("missing parameter '" + key + "' in " + context);
  return it->second;
}

void reject_unknown(const std::map<std::string, std::string>& params, std::initializer_list<const char*> known,
                    const std::string& context) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InputError("unknown parameter '" + key + "' in " + context);
  }
}

bool is_bare_param(const std::string& token) {
  return token.find('=') != std::string::npos && token.find(':') == std::string::npos &&
         token.find('(') == std::string::npos;
}

// `matern:m=1,h=0.5` is split into two top-level tokens; re-attach bare
// key=value tokens to the flat kernel spec before them.
std::vector<std::string> group_kernel_args(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (is_bare_param(t) && !out.empty() && out.back().find(':') != std::string::npos &&
        out.back().find('(') == std::string::npos) {
      out.back() += "," + t;
    } else {
      out.push_back(t);
    }
  }
  return out;
}

std::string pop_trailing(std::vector<std::string>& tokens, const std::string& key, const std::string& context) {
  if (tokens.empty() || !is_bare_param(tokens.back()) || trim(tokens.back().substr(0, tokens.back().find('='))) != key) {
    throw InputError(context + "(...) must end with " + key + "=<value>");
  }
  std::string last = tokens.back();
  tokens.pop_back();
  return last;
}

Kernel parse(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw InputError("empty kernel spec");

  const auto paren = text.find('(');
  if (paren != std::string::npos) {
    if (text.back() != ')') throw InputError("kernel spec must end with ')': " + text);
    const std::string name = trim(text.substr(0, paren));
    auto tokens = split_top_level(text.substr(paren + 1, text.size() - paren - 2));
    if (name == "sum" || name == "prod") {
      const auto args = group_kernel_args(tokens);
      if (args.size() != 2) throw InputError(name + "(...) takes exactly two kernels");
      const Kernel a = parse(args[0]), b = parse(args[1]);
      return name == "sum" ? Kernel::sum(a, b) : Kernel::product(a, b);
    }
    if (name == "reg") {
      const auto params = parse_params(pop_trailing(tokens, "var", "reg"), "reg");
      const auto args = group_kernel_args(tokens);
      if (args.size() != 1) throw InputError("reg(<kernel>,var=<v>) wraps exactly one kernel");
      return Kernel::regularized(parse(args[0]), parse_number(require_param(params, "var", "reg"), "reg"));
    }
    if (name == "tensor") {
      const auto params = parse_params(pop_trailing(tokens, "split", "tensor"), "tensor");
      const auto args = group_kernel_args(tokens);
      if (args.size() != 2) throw InputError("tensor(<a>,<b>,split=<n>) takes two kernels");
      return Kernel::tensor(parse(args[0]), parse(args[1]),
                            parse_int(require_param(params, "split", "tensor"), "tensor"));
    }
    throw InputError("unknown composite kernel '" + name + "'");
  }

  const auto colon = text.find(':');
  const std::string name = trim(text.substr(0, colon));
  const auto params =
      parse_params(colon == std::string::npos ? std::string{} : text.substr(colon + 1), name);

  if (name == "se") {
    reject_unknown(params, {"gamma"}, name);
    return Kernel::squared_exponential(parse_number(require_param(params, "gamma", name), name));
  }
  if (name == "matern") {
    reject_unknown(params, {"m", "h"}, name);
    return Kernel::matern(parse_int(require_param(params, "m", name), name),
                          parse_number(require_param(params, "h", name), name));
  }
  if (name == "laplace") {
    reject_unknown(params, {"h"}, name);
    return Kernel::laplace(parse_number(require_param(params, "h", name), name));
  }
  if (name == "brownian") {
    reject_unknown(params, {}, name);
    return Kernel::brownian();
  }
  if (name == "periodic") {
    reject_unknown(params, {"s"}, name);
    return Kernel::periodic_sobolev(parse_int(require_param(params, "s", name), name));
  }
  if (name == "delta") {
    reject_unknown(params, {"var"}, name);
    return Kernel::kronecker_delta(parse_number(require_param(params, "var", name), name));
  }
  if (name == "browndist") {
    reject_unknown(params, {"d", "c"}, name);
    const double c = params.count("c") ? parse_number(params.at("c"), name) : 2.0;
    return Kernel::brownian_distance(parse_int(require_param(params, "d", name), name), c);
  }
  throw InputError("unknown kernel family '" + name + "'");
}

}  // namespace

Kernel parse_kernel_spec(const std::string& text) { return parse(text); }

}  // namespace gpk
