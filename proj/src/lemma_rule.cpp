#include "lemma_engine/lemma_rule.hpp"

#include <algorithm>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

constexpr char32_t kUpArrow = 0x2191;     // ↑
constexpr char32_t kDownArrow = 0x2193;   // ↓
constexpr char32_t kBrokenBar = 0x00A6;   // ¦
constexpr char32_t kRightArrow = 0x2192;  // →

using unicode::decode;
using unicode::encode;

size_t count_consumed(const std::vector<EditOp>& ops) {
  size_t n = 0;
  for (const EditOp& op : ops) n += op.consumes();
  return n;
}

// Applies ops to a region of exactly count_consumed(ops) characters.
void apply_ops(const std::vector<EditOp>& ops, const char32_t* region,
               std::vector<char32_t>& out) {
  size_t pos = 0;
  for (const EditOp& op : ops) {
    switch (op.kind) {
      case EditOpKind::Delete:
        pos++;
        break;
      case EditOpKind::Insert:
        out.push_back(op.ch);
        break;
      case EditOpKind::Copy:
        out.push_back(region[pos++]);
        break;
    }
  }
}

}  // namespace

EditScript EditScript::make_absolute(std::string lemma_lower) {
  EditScript s;
  s.absolute = true;
  s.lemma_lower = std::move(lemma_lower);
  return s;
}

EditScript EditScript::make_delta(std::vector<EditOp> prefix,
                                  std::vector<EditOp> suffix) {
  EditScript s;
  s.prefix_ops = std::move(prefix);
  s.suffix_ops = std::move(suffix);
  return s;
}

const LemmaRule& identity_rule() {
  static const LemmaRule rule{{{CaseClass::Lower, 0}}, EditScript::make_delta({}, {})};
  return rule;
}

CasingScript extract_casing(const std::string& lemma) {
  std::vector<char32_t> chars = decode(lemma);
  CasingScript script;
  int32_t len = static_cast<int32_t>(chars.size());
  for (int32_t i = 0; i < len; i++) {
    CaseClass cls = unicode::is_upper(chars[i]) ? CaseClass::Upper : CaseClass::Lower;
    if (!script.empty() && script.back().case_class == cls) continue;
    int32_t index = i <= len / 2 ? i : i - len;
    script.push_back({cls, index});
  }
  return script;
}

std::string apply_casing(const CasingScript& script, const std::string& s) {
  std::vector<char32_t> chars = decode(s);
  int32_t len = static_cast<int32_t>(chars.size());
  for (const CasingSegment& seg : script) {
    int32_t pos = seg.index < 0 ? len + seg.index : seg.index;
    pos = std::clamp(pos, 0, len);
    for (int32_t i = pos; i < len; i++)
      chars[i] = seg.case_class == CaseClass::Upper ? unicode::to_upper(chars[i])
                                                    : unicode::to_lower(chars[i]);
  }
  return encode(chars);
}

std::optional<CommonRoot> longest_common_root(const std::string& form_lower,
                                              const std::string& lemma_lower) {
  std::vector<char32_t> f = decode(form_lower);
  std::vector<char32_t> l = decode(lemma_lower);
  if (f.empty() || l.empty()) return std::nullopt;

  // match[j]: length of the common suffix of f[..i] and l[..j], rolled over i.
  std::vector<size_t> match(l.size() + 1, 0), prev(l.size() + 1, 0);
  CommonRoot best{0, 0, 0};
  for (size_t i = 0; i < f.size(); i++) {
    std::swap(match, prev);
    match[0] = 0;
    for (size_t j = 0; j < l.size(); j++) {
      size_t run = f[i] == l[j] ? prev[j] + 1 : 0;
      match[j + 1] = run;
      if (run == 0) continue;
      size_t fs = i + 1 - run, ls = j + 1 - run;
      if (run > best.length ||
          (run == best.length && (ls < best.lemma_start ||
                                  (ls == best.lemma_start && fs < best.form_start))))
        best = {fs, ls, run};
    }
  }
  if (best.length == 0) return std::nullopt;
  return best;
}

std::vector<EditOp> min_edit_script(const std::string& source,
                                    const std::string& target, bool allow_copy) {
  std::vector<char32_t> s = decode(source);
  std::vector<char32_t> t = decode(target);
  std::vector<EditOp> ops;

  if (!allow_copy) {
    ops.reserve(s.size() + t.size());
    for (size_t i = 0; i < s.size(); i++) ops.push_back(EditOp::del());
    for (char32_t c : t) ops.push_back(EditOp::ins(c));
    return ops;
  }

  // cost[i][j]: minimum cost turning s[i..] into t[j..] under
  // Copy=0 (matching chars only), Delete=1, Insert=1.
  size_t n = s.size(), m = t.size();
  std::vector<std::vector<uint32_t>> cost(n + 1, std::vector<uint32_t>(m + 1, 0));
  for (size_t i = 0; i <= n; i++) cost[i][m] = static_cast<uint32_t>(n - i);
  for (size_t j = 0; j <= m; j++) cost[n][j] = static_cast<uint32_t>(m - j);
  for (size_t i = n; i-- > 0;) {
    for (size_t j = m; j-- > 0;) {
      uint32_t best = std::min(cost[i + 1][j] + 1, cost[i][j + 1] + 1);
      if (s[i] == t[j]) best = std::min(best, cost[i + 1][j + 1]);
      cost[i][j] = best;
    }
  }

  // Reconstruct preferring Delete, then Copy, then Insert on ties, so the
  // all-deletes-then-all-inserts order is the degenerate no-copy case.
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    uint32_t here = cost[i][j];
    if (i < n && cost[i + 1][j] + 1 == here) {
      ops.push_back(EditOp::del());
      i++;
    } else if (i < n && j < m && s[i] == t[j] && cost[i + 1][j + 1] == here) {
      ops.push_back(EditOp::copy());
      i++;
      j++;
    } else {
      ops.push_back(EditOp::ins(t[j]));
      j++;
    }
  }
  return ops;
}

LemmaRule encode_rule(const std::string& form, const std::string& lemma,
                      bool allow_copy) {
  if (form.empty()) throw RuleError("cannot encode a rule for an empty form");
  if (lemma.empty()) throw RuleError("cannot encode a rule for an empty lemma");

  LemmaRule rule;
  rule.casing = extract_casing(lemma);

  std::string f = unicode::lowercase(form);
  std::string l = unicode::lowercase(lemma);
  std::optional<CommonRoot> root = longest_common_root(f, l);
  if (!root) {
    rule.edit = EditScript::make_absolute(std::move(l));
    return rule;
  }

  std::vector<char32_t> fc = decode(f), lc = decode(l);
  auto slice = [](const std::vector<char32_t>& v, size_t from, size_t to) {
    return encode(std::vector<char32_t>(v.begin() + from, v.begin() + to));
  };
  std::string f_prefix = slice(fc, 0, root->form_start);
  std::string l_prefix = slice(lc, 0, root->lemma_start);
  std::string f_suffix = slice(fc, root->form_start + root->length, fc.size());
  std::string l_suffix = slice(lc, root->lemma_start + root->length, lc.size());

  rule.edit = EditScript::make_delta(min_edit_script(f_prefix, l_prefix, allow_copy),
                                     min_edit_script(f_suffix, l_suffix, allow_copy));
  return rule;
}

std::pair<size_t, size_t> consumed_counts(const LemmaRule& rule) {
  if (rule.edit.absolute) return {0, 0};
  return {count_consumed(rule.edit.prefix_ops), count_consumed(rule.edit.suffix_ops)};
}

std::string apply_rule(const LemmaRule& rule, const std::string& form) {
  if (rule.edit.absolute) {
    if (form.empty())
      throw NotApplicable("absolute rule applied to an empty form");
    return apply_casing(rule.casing, rule.edit.lemma_lower);
  }

  std::vector<char32_t> f = unicode::to_lower(decode(form));
  auto [cp, cs] = consumed_counts(rule);
  if (cp + cs > f.size())
    throw NotApplicable("rule consumes " + std::to_string(cp + cs) +
                        " characters but the form has " +
                        std::to_string(f.size()));

  std::vector<char32_t> out;
  out.reserve(f.size() + rule.edit.prefix_ops.size() + rule.edit.suffix_ops.size());
  apply_ops(rule.edit.prefix_ops, f.data(), out);
  out.insert(out.end(), f.begin() + cp, f.end() - cs);
  apply_ops(rule.edit.suffix_ops, f.data() + (f.size() - cs), out);
  return apply_casing(rule.casing, encode(out));
}

bool is_applicable(const LemmaRule& rule, const std::string& form) {
  if (rule.edit.absolute) return !form.empty();
  auto [cp, cs] = consumed_counts(rule);
  return cp + cs <= decode(form).size();
}

std::string format_rule(const LemmaRule& rule) {
  std::string out;
  bool first = true;
  for (const CasingSegment& seg : rule.casing) {
    if (!first) unicode::append(out, kBrokenBar);
    first = false;
    unicode::append(out, seg.case_class == CaseClass::Upper ? kUpArrow : kDownArrow);
    out += std::to_string(seg.index);
  }
  out += ';';
  if (rule.edit.absolute) {
    out += 'a';
    out += rule.edit.lemma_lower;
    return out;
  }
  out += 'd';
  auto emit_ops = [&out](const std::vector<EditOp>& ops) {
    for (const EditOp& op : ops) {
      switch (op.kind) {
        case EditOpKind::Delete:
          out += '-';
          break;
        case EditOpKind::Insert:
          out += '+';
          unicode::append(out, op.ch);
          break;
        case EditOpKind::Copy:
          unicode::append(out, kRightArrow);
          break;
      }
    }
  };
  emit_ops(rule.edit.prefix_ops);
  unicode::append(out, kBrokenBar);
  emit_ops(rule.edit.suffix_ops);
  return out;
}

LemmaRule parse_rule(const std::string& s) {
  size_t semi = s.find(';');
  if (semi == std::string::npos)
    throw RuleError("malformed rule '" + s + "': missing ';'");

  std::vector<char32_t> casing_part = decode(s.substr(0, semi));
  LemmaRule rule;
  size_t i = 0;
  while (true) {
    if (i >= casing_part.size())
      throw RuleError("malformed rule '" + s + "': empty casing segment");
    char32_t arrow = casing_part[i++];
    if (arrow != kUpArrow && arrow != kDownArrow)
      throw RuleError("malformed rule '" + s + "': casing segment must start with an arrow");
    bool negative = false;
    if (i < casing_part.size() && casing_part[i] == U'-') {
      negative = true;
      i++;
    }
    if (i >= casing_part.size() || casing_part[i] < U'0' || casing_part[i] > U'9')
      throw RuleError("malformed rule '" + s + "': casing segment has no index");
    int64_t value = 0;
    while (i < casing_part.size() && casing_part[i] >= U'0' && casing_part[i] <= U'9') {
      value = value * 10 + (casing_part[i] - U'0');
      if (value > INT32_MAX)
        throw RuleError("malformed rule '" + s + "': casing index out of range");
      i++;
    }
    rule.casing.push_back({arrow == kUpArrow ? CaseClass::Upper : CaseClass::Lower,
                           static_cast<int32_t>(negative ? -value : value)});
    if (i == casing_part.size()) break;
    if (casing_part[i] != kBrokenBar)
      throw RuleError("malformed rule '" + s + "': expected '¦' between casing segments");
    i++;
  }

  std::string edit_part = s.substr(semi + 1);
  if (edit_part.empty())
    throw RuleError("malformed rule '" + s + "': empty edit script");
  if (edit_part[0] == 'a') {
    rule.edit = EditScript::make_absolute(edit_part.substr(1));
    return rule;
  }
  if (edit_part[0] != 'd')
    throw RuleError("malformed rule '" + s + "': unknown edit marker");

  std::vector<char32_t> ops_part = decode(edit_part.substr(1));
  std::vector<EditOp> prefix, suffix;
  std::vector<EditOp>* current = &prefix;
  bool seen_separator = false;
  for (size_t k = 0; k < ops_part.size(); k++) {
    char32_t c = ops_part[k];
    if (c == U'-') {
      current->push_back(EditOp::del());
    } else if (c == U'+') {
      if (++k >= ops_part.size())
        throw RuleError("malformed rule '" + s + "': '+' without a character");
      current->push_back(EditOp::ins(ops_part[k]));
    } else if (c == kRightArrow) {
      current->push_back(EditOp::copy());
    } else if (c == kBrokenBar) {
      if (seen_separator)
        throw RuleError("malformed rule '" + s + "': duplicate '¦' in edit script");
      seen_separator = true;
      current = &suffix;
    } else {
      throw RuleError("malformed rule '" + s + "': unexpected edit character");
    }
  }
  if (!seen_separator)
    throw RuleError("malformed rule '" + s + "': missing '¦' in delta script");
  rule.edit = EditScript::make_delta(std::move(prefix), std::move(suffix));
  return rule;
}

}  // namespace lemma_engine
