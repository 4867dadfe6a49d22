#include "pwca/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pwca/error.hpp"
#include "text_io.hpp"

namespace pwca {

namespace {

constexpr std::size_t kWrapColumn = 200;

std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "minimize", "minimise", "minimum", "min",     "maximize", "maximise", "maximum",
      "max",      "subject",  "to",      "such",    "that",     "st",       "s.t.",
      "bounds",   "bound",    "binaries", "binary", "bin",      "generals", "general",
      "gen",      "end",      "free",    "inf",     "infinity"};
  return words;
}

void check_name(const std::string& name) {
  static const std::string forbidden = "+-*/<>=:;[]^\\\"',";
  const bool bad_start =
      name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.';
  const bool bad_char = name.find_first_of(forbidden) != std::string::npos;
  if (bad_start || bad_char || reserved_words().count(lower_case(name)) > 0) {
    throw Error(ErrorCode::kNaming, "name '" + name + "' cannot be written in LP format");
  }
}

class LineWriter {
 public:
  explicit LineWriter(std::ostream& out) : out_(out) {}
  void add(const std::string& token) {
    if (line_.size() + token.size() + 1 > kWrapColumn && line_.size() > 1) flush();
    line_ += ' ';
    line_ += token;
  }
  void flush() {
    if (!line_.empty()) out_ << line_ << '\n';
    line_.clear();
  }

 private:
  std::ostream& out_;
  std::string line_;
};

void write_terms(LineWriter& w, const MilpProblem& p, const std::vector<Term>& terms) {
  bool first = true;
  for (const Term& t : terms) {
    if (std::signbit(t.coef)) {
      w.add("-");
    } else if (!first) {
      w.add("+");
    }
    w.add(detail::format_double(std::abs(t.coef)));
    w.add(p.variable(t.var).name);
    first = false;
  }
}

std::string bound_text(double v) {
  if (v == kInfinity) return "+inf";
  if (v == -kInfinity) return "-inf";
  return detail::format_double(v);
}

}  // namespace

void export_lp(std::ostream& out, const MilpProblem& problem) {
  for (const Variable& v : problem.variables()) check_name(v.name);
  for (const Constraint& c : problem.constraints()) check_name(c.name);

  out << (problem.sense() == Sense::kMinimize ? "Minimize" : "Maximize") << '\n';
  LineWriter w(out);
  w.add("obj:");
  write_terms(w, problem, problem.objective());
  w.flush();

  out << "Subject To\n";
  for (const Constraint& c : problem.constraints()) {
    w.add(c.name + ":");
    write_terms(w, problem, c.terms);
    switch (c.relation) {
      case Relation::kLessEqual: w.add("<="); break;
      case Relation::kGreaterEqual: w.add(">="); break;
      case Relation::kEqual: w.add("="); break;
    }
    w.add(detail::format_double(c.rhs));
    w.flush();
  }

  out << "Bounds\n";
  for (const Variable& v : problem.variables()) {
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out << ' ' << v.name << " free\n";
    } else {
      out << ' ' << bound_text(v.lower) << " <= " << v.name << " <= " << bound_text(v.upper)
          << '\n';
    }
  }

  bool any_binary = false;
  for (const Variable& v : problem.variables()) {
    if (v.type != VarType::kBinary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    w.add(v.name);
  }
  w.flush();
  out << "End\n";
  if (!out) throw Error(ErrorCode::kIo, "failed to write LP document");
}

namespace {

enum class Section { kNone, kObjective, kRows, kBounds, kBinaries, kEnd };

struct RawRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

struct RawBound {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool has_lower = false;
  bool has_upper = false;
};

bool is_number(const std::string& t) {
  if (t.empty()) return false;
  const char c = t[0];
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
  if ((c == '+' || c == '-') && t.size() > 1) return true;
  const std::string l = lower_case(t);
  return l == "inf" || l == "infinity";
}

double to_number(const std::string& t) {
  std::string s = lower_case(t);
  const bool neg = !s.empty() && s[0] == '-';
  const std::string body = (s[0] == '+' || s[0] == '-') ? s.substr(1) : s;
  if (body == "inf" || body == "infinity") return neg ? -kInfinity : kInfinity;
  return detail::parse_double(t);
}

bool relation_token(const std::string& t, Relation& r) {
  if (t == "<=" || t == "=<" || t == "<") {
    r = Relation::kLessEqual;
  } else if (t == ">=" || t == "=>" || t == ">") {
    r = Relation::kGreaterEqual;
  } else if (t == "=") {
    r = Relation::kEqual;
  } else {
    return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::vector<std::string> tokens) : tok_(std::move(tokens)) {}

  MilpProblem parse() {
    while (pos_ < tok_.size()) {
      const Section s = section_at();
      if (s == Section::kNone) fail("unexpected token '" + tok_[pos_] + "'");
      if (s == Section::kEnd) {
        ++pos_;
        break;
      }
      switch (s) {
        case Section::kObjective: parse_objective(); break;
        case Section::kRows: parse_rows(); break;
        case Section::kBounds: parse_bounds(); break;
        case Section::kBinaries: parse_binaries(); break;
        default: break;
      }
    }
    if (!saw_objective_) fail("missing objective section");
    return build();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, "LP document: " + what);
  }

  // Recognizes a section header at pos_ and consumes it.
  Section section_at() {
    const std::string t = lower_case(tok_[pos_]);
    auto next_is = [&](const char* word) {
      return pos_ + 1 < tok_.size() && lower_case(tok_[pos_ + 1]) == word;
    };
    if (t == "minimize" || t == "minimise" || t == "minimum" || t == "min") {
      ++pos_;
      sense_ = Sense::kMinimize;
      return Section::kObjective;
    }
    if (t == "maximize" || t == "maximise" || t == "maximum" || t == "max") {
      ++pos_;
      sense_ = Sense::kMaximize;
      return Section::kObjective;
    }
    if ((t == "subject" && next_is("to")) || (t == "such" && next_is("that"))) {
      pos_ += 2;
      return Section::kRows;
    }
    if (t == "st" || t == "s.t.") {
      ++pos_;
      return Section::kRows;
    }
    if (t == "bounds" || t == "bound") {
      ++pos_;
      return Section::kBounds;
    }
    if (t == "binaries" || t == "binary" || t == "bin") {
      ++pos_;
      return Section::kBinaries;
    }
    if (t == "generals" || t == "general" || t == "gen") fail("general integers are not supported");
    if (t == "end") return Section::kEnd;
    return Section::kNone;
  }

  bool at_section() {
    const std::size_t saved = pos_;
    const Sense sense = sense_;
    const bool found = section_at() != Section::kNone;
    pos_ = saved;
    sense_ = sense;
    return found;
  }

  bool at_end() { return pos_ >= tok_.size() || at_section(); }

  // Reads "[+|-] [coef] name" terms until a relation or a section header.
  std::vector<std::pair<std::string, double>> parse_terms() {
    std::vector<std::pair<std::string, double>> terms;
    Relation r;
    while (!at_end() && !relation_token(tok_[pos_], r)) {
      // A label ends the expression of the previous row.
      if (tok_[pos_].back() == ':') break;
      double sign = 1.0;
      while (tok_[pos_] == "+" || tok_[pos_] == "-") {
        if (tok_[pos_] == "-") sign = -sign;
        if (++pos_ >= tok_.size()) fail("expression ends after a sign");
      }
      double coef = 1.0;
      if (is_number(tok_[pos_])) {
        coef = to_number(tok_[pos_]);
        if (++pos_ >= tok_.size()) fail("coefficient without a variable");
      }
      const std::string& name = tok_[pos_];
      if (is_number(name) || relation_token(name, r)) fail("expected a variable name");
      terms.emplace_back(name, sign * coef);
      ++pos_;
    }
    return terms;
  }

  std::string optional_label() {
    if (pos_ < tok_.size() && tok_[pos_].size() > 1 && tok_[pos_].back() == ':') {
      std::string label = tok_[pos_].substr(0, tok_[pos_].size() - 1);
      ++pos_;
      return label;
    }
    return {};
  }

  void parse_objective() {
    saw_objective_ = true;
    optional_label();
    objective_ = parse_terms();
    Relation r;
    if (pos_ < tok_.size() && relation_token(tok_[pos_], r)) fail("relation in the objective");
  }

  void parse_rows() {
    while (!at_end()) {
      RawRow row;
      row.name = optional_label();
      row.terms = parse_terms();
      if (pos_ >= tok_.size() || !relation_token(tok_[pos_], row.relation)) {
        fail("row '" + row.name + "' has no relation");
      }
      ++pos_;
      double sign = 1.0;
      if (pos_ < tok_.size() && (tok_[pos_] == "-" || tok_[pos_] == "+")) {
        if (tok_[pos_] == "-") sign = -1.0;
        ++pos_;
      }
      if (pos_ >= tok_.size() || !is_number(tok_[pos_])) fail("row '" + row.name + "' has no right-hand side");
      row.rhs = sign * to_number(tok_[pos_++]);
      rows_.push_back(std::move(row));
    }
  }

  double signed_number() {
    double sign = 1.0;
    if (pos_ < tok_.size() && (tok_[pos_] == "-" || tok_[pos_] == "+")) {
      if (tok_[pos_] == "-") sign = -1.0;
      ++pos_;
    }
    if (pos_ >= tok_.size() || !is_number(tok_[pos_])) fail("expected a bound value");
    return sign * to_number(tok_[pos_++]);
  }

  RawBound& bound_for(const std::string& name) {
    note_variable(name);
    return bounds_[name];
  }

  void parse_bounds() {
    Relation r;
    while (!at_end()) {
      if (is_number(tok_[pos_]) || tok_[pos_] == "-" || tok_[pos_] == "+") {
        // lo <= name [<= hi]
        const double lo = signed_number();
        if (pos_ >= tok_.size() || !relation_token(tok_[pos_], r) || r != Relation::kLessEqual) {
          fail("malformed bound");
        }
        ++pos_;
        if (pos_ >= tok_.size()) fail("malformed bound");
        RawBound& b = bound_for(tok_[pos_++]);
        b.lower = lo;
        b.has_lower = true;
        if (pos_ < tok_.size() && relation_token(tok_[pos_], r)) {
          if (r != Relation::kLessEqual) fail("malformed bound");
          ++pos_;
          b.upper = signed_number();
          b.has_upper = true;
        }
        continue;
      }
      const std::string name = tok_[pos_++];
      RawBound& b = bound_for(name);
      if (pos_ < tok_.size() && lower_case(tok_[pos_]) == "free") {
        ++pos_;
        b.lower = -kInfinity;
        b.upper = kInfinity;
        b.has_lower = b.has_upper = true;
        continue;
      }
      if (pos_ >= tok_.size() || !relation_token(tok_[pos_], r)) fail("malformed bound for '" + name + "'");
      ++pos_;
      const double v = signed_number();
      if (r != Relation::kGreaterEqual) {
        b.upper = v;
        b.has_upper = true;
      }
      if (r != Relation::kLessEqual) {
        b.lower = v;
        b.has_lower = true;
      }
    }
  }

  void parse_binaries() {
    while (!at_end()) {
      const std::string& name = tok_[pos_++];
      note_variable(name);
      binaries_.insert(name);
    }
  }

  void note_variable(const std::string& name) {
    if (seen_.insert(name).second) order_.push_back(name);
  }

  MilpProblem build() {
    for (const auto& [name, coef] : objective_) note_variable(name);
    for (const RawRow& row : rows_) {
      for (const auto& [name, coef] : row.terms) note_variable(name);
    }
    MilpProblem p;
    for (const std::string& name : order_) {
      Variable v;
      v.name = name;
      const bool binary = binaries_.count(name) > 0;
      v.type = binary ? VarType::kBinary : VarType::kContinuous;
      v.lower = 0.0;
      v.upper = binary ? 1.0 : kInfinity;
      if (const auto it = bounds_.find(name); it != bounds_.end()) {
        if (it->second.has_lower) v.lower = it->second.lower;
        if (it->second.has_upper) v.upper = it->second.upper;
      }
      p.add_variable(std::move(v));
    }
    auto convert = [&](const std::vector<std::pair<std::string, double>>& raw) {
      std::vector<Term> terms;
      for (const auto& [name, coef] : raw) terms.push_back({p.index_of(name), coef});
      return terms;
    };
    for (const RawRow& row : rows_) {
      p.add_constraint(convert(row.terms), row.relation, row.rhs, row.name);
    }
    p.set_objective(convert(objective_), sense_);
    return p;
  }

  std::vector<std::string> tok_;
  std::size_t pos_ = 0;
  Sense sense_ = Sense::kMinimize;
  bool saw_objective_ = false;
  std::vector<std::pair<std::string, double>> objective_;
  std::vector<RawRow> rows_;
  std::map<std::string, RawBound> bounds_;
  std::set<std::string> binaries_;
  std::vector<std::string> order_;
  std::set<std::string> seen_;
};

}  // namespace

MilpProblem read_lp(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    for (std::string& t : detail::split_ws(line)) tokens.push_back(std::move(t));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "failed to read LP document");
  try {
    return Parser(std::move(tokens)).parse();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, std::string("LP document: ") + e.what());
  }
}

}  // namespace pwca
