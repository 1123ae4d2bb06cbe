#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "curev/corpus.hpp"

namespace curev::metrics {

struct SyntaxNode {
    std::string type;
    std::string text;  // token text of a leaf, or the operator of an operator node
    std::vector<SyntaxNode> children;

    bool is_leaf() const { return children.empty(); }
    /// Node types only: "(binary_expression (identifier) (number_literal))".
    std::string sexp() const;
};

struct SyntaxTree {
    SyntaxNode root;
    bool has_errors = false;  // the parser had to recover somewhere
};

/// Variable-use edge: `variable` comesFrom / computedFrom `sources`.
struct DataflowEdge {
    std::string variable;
    std::string relation;
    std::vector<std::string> sources;

    auto operator<=>(const DataflowEdge&) const = default;
};

/// Language support consumed by CodeBLEU's syntax and data-flow components.
class GrammarProvider {
public:
    virtual ~GrammarProvider() = default;
    virtual bool supports(corpus::Language language) const = 0;
    /// Deterministic; recovers from syntax errors and flags them.
    virtual SyntaxTree parse(std::string_view code, corpus::Language language) const = 0;
    virtual std::set<std::string, std::less<>> keywords(corpus::Language language) const;
    /// Edges in source order; edges with no source are left out.
    virtual std::vector<DataflowEdge> dataflow(const SyntaxTree& tree) const = 0;
};

/// Reserved words of each corpus language.
const std::set<std::string, std::less<>>& language_keywords(corpus::Language language);

/// Error-tolerant recursive-descent parser for a C subset: declarations,
/// function definitions, the usual statements, and C expression precedence.
/// Preprocessor lines and comments are skipped.
class CLikeGrammar final : public GrammarProvider {
public:
    CLikeGrammar() : languages_{corpus::Language::c} {}
    explicit CLikeGrammar(std::set<corpus::Language> languages) : languages_(std::move(languages)) {}

    bool supports(corpus::Language language) const override { return languages_.count(language) > 0; }
    SyntaxTree parse(std::string_view code, corpus::Language language) const override;
    std::vector<DataflowEdge> dataflow(const SyntaxTree& tree) const override;

private:
    std::set<corpus::Language> languages_;
};

/// Provider that supports nothing; CodeBLEU then falls back to its n-gram
/// components.
class NoGrammar final : public GrammarProvider {
public:
    bool supports(corpus::Language) const override { return false; }
    SyntaxTree parse(std::string_view, corpus::Language) const override;
    std::vector<DataflowEdge> dataflow(const SyntaxTree&) const override { return {}; }
};

/// Non-leaf subtrees of `tree` as s-expressions, in pre-order.
std::vector<std::string> subtree_sexps(const SyntaxNode& tree);

/// Renames variables to var_0, var_1, ... in order of first appearance.
std::vector<DataflowEdge> normalize_dataflow(const std::vector<DataflowEdge>& edges);

}  // namespace curev::metrics
