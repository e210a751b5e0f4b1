#pragma once

// The presentation file format, run reports, and the command runner behind
// the dainf tool.  The grammar is documented in docs/format.md.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dainf/structure.hpp"

namespace dainf {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& bare_message() const { return bare_; }

 private:
  int line_, column_;
  std::string bare_;
};

struct NamedAlgebra {
  std::string name;
  StructureFamily structure;
};

// A family of components f_{st} from one declared algebra to another.  A
// map from an algebra to itself doubles as a cochain (e.g. a perturbation).
struct NamedMap {
  std::string name, source, target;
  MorphismFamily family;
};

struct Presentation {
  Ring ring = Ring::rationals();
  std::optional<Window> window;
  std::vector<NamedAlgebra> algebras;
  std::vector<NamedMap> maps;
  // `meta` lines, kept in order: a keyword and its arguments.
  std::vector<std::vector<std::string>> meta;

  const NamedAlgebra& algebra(const std::string& name) const;  // throws std::invalid_argument
  const NamedMap& map(const std::string& name) const;
  const NamedAlgebra* find_algebra(const std::string& name) const;
  const NamedMap* find_map(const std::string& name) const;
};

// With `ring`, coefficients are read in that ring instead of the declared one.
Presentation parse_presentation(const std::string& text, std::optional<Ring> ring = {});
std::string emit_presentation(const Presentation& p);
bool same_presentation(const Presentation& a, const Presentation& b);

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t h);

// Exit statuses shared by every command.
enum class Verdict { verified = 0, refuted = 1, window_insufficient = 2, usage = 3 };
std::string to_string(Verdict v);

struct RunReport {
  std::string command;
  std::string inputs;  // digest of file bytes and flags
  std::vector<std::string> flags;
  std::string window;
  bool total = true;
  Verdict verdict = Verdict::verified;
  // Ordered key/value results, then free-form table lines.
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<std::string> lines;
  std::optional<double> seconds;  // only printed when asked for

  void result(const std::string& key, const std::string& value) { results.emplace_back(key, value); }
  const std::string* find(const std::string& key) const;
};

std::string emit_report(const RunReport& r);
RunReport parse_report(const std::string& text);

// Runs one command line (without the program name).  The report goes to
// `out`, diagnostics to `err`; the return value is the exit status.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dainf
