#pragma once

// Lemma rules: a casing script plus an edit script, together encoding the
// transformation from a word form to its lemma. Rules serialize to a compact
// string syntax and act as the class labels of the lemmatizer.
//
// Rule-string grammar (all separators are single Unicode characters):
//   rule   := casing ";" edit
//   casing := seg ("¦" seg)*            ¦ = U+00A6
//   seg    := ("↑" | "↓") signed-int    ↑ = U+2191, ↓ = U+2193
//   edit   := "a" lemma_lower
//           | "d" ops "¦" ops           prefix ops, then suffix ops
//   ops    := ( "-" | "+" char | "→" )* → = U+2192 (copy, only in copy mode)

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lemma_engine {

struct RuleError : std::runtime_error {
  explicit RuleError(const std::string& what) : std::runtime_error(what) {}
};

struct NotApplicable : RuleError {
  explicit NotApplicable(const std::string& what) : RuleError(what) {}
};

enum class CaseClass : uint8_t { Lower, Upper };

struct CasingSegment {
  CaseClass case_class;
  // Start-relative when the change index i satisfies i <= floor(len/2),
  // else stored end-relative as i - len (negative).
  int32_t index;

  bool operator==(const CasingSegment&) const = default;
};

// Ordered list of segments; each re-cases from its resolved index through the
// end of the string, later segments overwriting the tail.
using CasingScript = std::vector<CasingSegment>;

enum class EditOpKind : uint8_t { Delete, Insert, Copy };

struct EditOp {
  EditOpKind kind;
  char32_t ch = 0;  // payload of Insert only

  static EditOp del() { return {EditOpKind::Delete, 0}; }
  static EditOp ins(char32_t c) { return {EditOpKind::Insert, c}; }
  static EditOp copy() { return {EditOpKind::Copy, 0}; }
  // Number of source characters the op consumes.
  bool consumes() const { return kind != EditOpKind::Insert; }

  bool operator==(const EditOp&) const = default;
};

struct EditScript {
  bool absolute = false;
  std::string lemma_lower;          // absolute scripts only (UTF-8)
  std::vector<EditOp> prefix_ops;   // delta scripts only
  std::vector<EditOp> suffix_ops;

  static EditScript make_absolute(std::string lemma_lower);
  static EditScript make_delta(std::vector<EditOp> prefix, std::vector<EditOp> suffix);

  bool operator==(const EditScript&) const = default;
};

struct LemmaRule {
  CasingScript casing;
  EditScript edit;

  bool operator==(const LemmaRule&) const = default;
};

// The rule every form maps onto itself (lowercased): "↓0;d¦".
const LemmaRule& identity_rule();

// Casing script recovering `lemma`'s capitalization from its lowercased copy.
// A segment starts at every index where the case class changes.
CasingScript extract_casing(const std::string& lemma);

// Applies the script to s: each segment re-cases from its resolved position
// (negative indices count from the end, positions clamp to [0, len]) through
// the end of the string.
std::string apply_casing(const CasingScript& script, const std::string& s);

struct CommonRoot {
  size_t form_start;
  size_t lemma_start;
  size_t length;

  bool operator==(const CommonRoot&) const = default;
};

// Longest common contiguous substring of two lowercased strings (in scalar
// values); ties broken by smallest lemma_start, then smallest form_start.
// Empty when the strings share no character.
std::optional<CommonRoot> longest_common_root(const std::string& form_lower,
                                              const std::string& lemma_lower);

// Without copy: canonical script of one Delete per source character followed
// by one Insert per target character. With copy: minimum cost under
// Copy=0, Delete=1, Insert=1, deletes ordered before inserts on ties.
std::vector<EditOp> min_edit_script(const std::string& source,
                                    const std::string& target, bool allow_copy);

// Builds the rule encoding form -> lemma. Throws RuleError on empty input.
LemmaRule encode_rule(const std::string& form, const std::string& lemma,
                      bool allow_copy);

// Applies the rule to a form; throws NotApplicable when the scripts consume
// more characters than the form has.
std::string apply_rule(const LemmaRule& rule, const std::string& form);

// True iff apply_rule(rule, form) succeeds.
bool is_applicable(const LemmaRule& rule, const std::string& form);

// Characters consumed by the prefix and suffix scripts of a delta rule
// (zero for absolute rules); used for cheap applicability checks.
std::pair<size_t, size_t> consumed_counts(const LemmaRule& rule);

std::string format_rule(const LemmaRule& rule);

// Parses the rule-string grammar above; splits at the first ";" so absolute
// lemmas containing "¦" stay parseable. Throws RuleError on malformed input.
LemmaRule parse_rule(const std::string& s);

}  // namespace lemma_engine
