#include <algorithm>
#include <array>
#include <map>

#include "curev/metrics/grammar.hpp"

namespace curev::metrics {

std::string SyntaxNode::sexp() const {
    std::string out = "(" + type;
    for (const auto& c : children) out += " " + c.sexp();
    out += ")";
    return out;
}

std::vector<std::string> subtree_sexps(const SyntaxNode& tree) {
    std::vector<std::string> out;
    std::vector<const SyntaxNode*> stack{&tree};
    while (!stack.empty()) {
        const auto* node = stack.back();
        stack.pop_back();
        if (node->is_leaf()) continue;
        out.push_back(node->sexp());
        for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) stack.push_back(&*it);
    }
    return out;
}

std::vector<DataflowEdge> normalize_dataflow(const std::vector<DataflowEdge>& edges) {
    std::map<std::string, std::string, std::less<>> names;
    auto rename = [&](const std::string& v) -> const std::string& {
        auto it = names.find(v);
        if (it == names.end()) it = names.emplace(v, "var_" + std::to_string(names.size())).first;
        return it->second;
    };
    std::vector<DataflowEdge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
        DataflowEdge n{rename(e.variable), e.relation, {}};
        for (const auto& s : e.sources) n.sources.push_back(rename(s));
        out.push_back(std::move(n));
    }
    return out;
}

SyntaxTree NoGrammar::parse(std::string_view, corpus::Language) const {
    return {SyntaxNode{"translation_unit", "", {}}, true};
}

namespace {

enum class Tok { ident, number, string, chr, punct, end };

struct Token {
    Tok kind;
    std::string text;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::array<std::string_view, 23> kPuncts{
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::",
};

std::vector<Token> lex(std::string_view src, bool& errors) {
    std::vector<Token> out;
    std::size_t i = 0;
    bool line_start = true;
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            line_start = true;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (line_start && c == '#') {
            // Preprocessor line, honoring backslash continuations.
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') ++i;
                ++i;
            }
            continue;
        }
        line_start = false;
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            const auto end = src.find("*/", i + 2);
            if (end == std::string_view::npos) {
                errors = true;
                break;
            }
            i = end + 2;
            continue;
        }
        if (ident_start(c)) {
            const auto start = i;
            while (i < src.size() && ident_char(src[i])) ++i;
            out.push_back({Tok::ident, std::string(src.substr(start, i - start))});
            continue;
        }
        if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
            const auto start = i;
            while (i < src.size() && (ident_char(src[i]) || src[i] == '.' ||
                                      ((src[i] == '+' || src[i] == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E'))))
                ++i;
            out.push_back({Tok::number, std::string(src.substr(start, i - start))});
            continue;
        }
        if (c == '"' || c == '\'') {
            const auto start = i++;
            while (i < src.size() && src[i] != c && src[i] != '\n') i += src[i] == '\\' ? 2 : 1;
            if (i >= src.size() || src[i] != c) {
                errors = true;
            } else {
                ++i;
            }
            i = std::min(i, src.size());
            out.push_back({c == '"' ? Tok::string : Tok::chr, std::string(src.substr(start, i - start))});
            continue;
        }
        std::string_view punct = src.substr(i, 1);
        for (auto p : kPuncts) {
            if (src.substr(i, p.size()) == p) {
                punct = p;
                break;
            }
        }
        out.push_back({Tok::punct, std::string(punct)});
        i += punct.size();
    }
    out.push_back({Tok::end, ""});
    return out;
}

bool is_one_of(std::string_view s, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), s) != set.end();
}

bool primitive_type(std::string_view s) {
    return is_one_of(s, {"void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool",
                         "bool"});
}
bool type_qualifier(std::string_view s) { return is_one_of(s, {"const", "volatile", "restrict"}); }
bool storage_class(std::string_view s) {
    return is_one_of(s, {"static", "extern", "inline", "register", "auto", "typedef"});
}
bool tag_keyword(std::string_view s) { return is_one_of(s, {"struct", "union", "enum"}); }
bool statement_keyword(std::string_view s) {
    return is_one_of(s, {"if", "else", "while", "do", "for", "return", "break", "continue", "switch", "case",
                         "default", "goto", "sizeof"});
}
bool specifier_word(std::string_view s) {
    return primitive_type(s) || type_qualifier(s) || storage_class(s) || tag_keyword(s);
}

SyntaxNode leaf(std::string type, std::string text = {}) { return SyntaxNode{std::move(type), std::move(text), {}}; }
SyntaxNode node(std::string type, std::vector<SyntaxNode> children, std::string op = {}) {
    return SyntaxNode{std::move(type), std::move(op), std::move(children)};
}

int binary_precedence(std::string_view op) {
    static const std::map<std::string_view, int> table{
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6}, {"<", 7},  {">", 7},
        {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},  {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10},
    };
    auto it = table.find(op);
    return it == table.end() ? 0 : it->second;
}

bool assignment_op(std::string_view op) {
    return is_one_of(op, {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="});
}

class Parser {
public:
    Parser(std::vector<Token> tokens, bool errors) : toks_(std::move(tokens)), errors_(errors) {}

    SyntaxTree run() {
        SyntaxNode unit{"translation_unit", "", {}};
        while (!at_end()) {
            const auto before = pos_;
            if (starts_declaration()) {
                unit.children.push_back(external_declaration());
            } else {
                unit.children.push_back(statement());
            }
            if (pos_ == before) unit.children.push_back(error_token());
        }
        return {std::move(unit), errors_};
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::end; }
    bool is(std::string_view p, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return (t.kind == Tok::punct || t.kind == Tok::ident) && t.text == p;
    }
    bool accept(std::string_view p) {
        if (!is(p)) return false;
        ++pos_;
        return true;
    }
    void expect(std::string_view p) {
        if (!accept(p)) errors_ = true;
    }
    SyntaxNode error_token() {
        errors_ = true;
        return leaf("ERROR", toks_[pos_++].text);
    }
    bool ident_like(std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind == Tok::ident && !statement_keyword(t.text) && !specifier_word(t.text);
    }

    bool starts_declaration() const {
        const auto& t = peek();
        if (t.kind != Tok::ident) return false;
        if (specifier_word(t.text)) return true;
        if (!ident_like()) return false;
        if (ident_like(1)) return true;  // "size_t n"
        // "T *p =", "T **p;"
        std::size_t k = 1;
        while (is("*", k)) ++k;
        return k > 1 && ident_like(k) && (is("=", k + 1) || is(";", k + 1) || is(",", k + 1) || is("[", k + 1));
    }

    std::vector<SyntaxNode> specifiers() {
        std::vector<SyntaxNode> out;
        bool have_type = false;
        while (peek().kind == Tok::ident) {
            const auto& w = peek().text;
            if (primitive_type(w)) {
                out.push_back(leaf("primitive_type", w));
                have_type = true;
                ++pos_;
            } else if (type_qualifier(w)) {
                out.push_back(leaf("type_qualifier", w));
                ++pos_;
            } else if (storage_class(w)) {
                out.push_back(leaf("storage_class_specifier", w));
                ++pos_;
            } else if (tag_keyword(w)) {
                out.push_back(tag_specifier());
                have_type = true;
            } else if (!have_type && ident_like()) {
                out.push_back(leaf("type_identifier", w));
                have_type = true;
                ++pos_;
            } else {
                break;
            }
        }
        return out;
    }

    SyntaxNode tag_specifier() {
        const std::string kind = peek().text;
        ++pos_;
        SyntaxNode spec{kind + "_specifier", "", {}};
        if (ident_like()) spec.children.push_back(leaf("type_identifier", toks_[pos_++].text));
        if (is("{")) {
            ++pos_;
            SyntaxNode body{kind == "enum" ? "enumerator_list" : "field_declaration_list", "", {}};
            while (!is("}") && !at_end()) {
                const auto before = pos_;
                if (kind == "enum") {
                    if (ident_like()) {
                        SyntaxNode e{"enumerator", "", {leaf("identifier", toks_[pos_++].text)}};
                        if (accept("=")) e.children.push_back(conditional());
                        body.children.push_back(std::move(e));
                    }
                    accept(",");
                } else {
                    SyntaxNode field{"field_declaration", "", specifiers()};
                    do {
                        if (is(";")) break;
                        field.children.push_back(declarator());
                    } while (accept(","));
                    expect(";");
                    body.children.push_back(std::move(field));
                }
                if (pos_ == before) body.children.push_back(error_token());
            }
            expect("}");
            spec.children.push_back(std::move(body));
        }
        return spec;
    }

    SyntaxNode declarator() {
        if (accept("*")) {
            SyntaxNode p{"pointer_declarator", "", {}};
            while (peek().kind == Tok::ident && type_qualifier(peek().text))
                p.children.push_back(leaf("type_qualifier", toks_[pos_++].text));
            p.children.push_back(declarator());
            return p;
        }
        SyntaxNode d;
        if (ident_like()) {
            d = leaf("identifier", toks_[pos_++].text);
        } else if (is("(")) {
            ++pos_;
            d = node("parenthesized_declarator", {declarator()});
            expect(")");
        } else {
            errors_ = true;
            return leaf("ERROR");
        }
        for (;;) {
            if (accept("[")) {
                std::vector<SyntaxNode> kids{std::move(d)};
                if (!is("]")) kids.push_back(expression());
                expect("]");
                d = node("array_declarator", std::move(kids));
            } else if (is("(")) {
                d = node("function_declarator", {std::move(d), parameter_list()});
            } else {
                return d;
            }
        }
    }

    SyntaxNode parameter_list() {
        expect("(");
        SyntaxNode list{"parameter_list", "", {}};
        while (!is(")") && !at_end()) {
            const auto before = pos_;
            if (accept("...")) {
                list.children.push_back(leaf("variadic_parameter"));
            } else {
                SyntaxNode p{"parameter_declaration", "", specifiers()};
                if (!is(",") && !is(")")) p.children.push_back(declarator());
                list.children.push_back(std::move(p));
            }
            if (!accept(",") && !is(")")) {
                if (pos_ == before) list.children.push_back(error_token());
                else errors_ = true;
                if (!is(",") && !is(")")) break;
            }
        }
        expect(")");
        return list;
    }

    SyntaxNode initializer() {
        if (!is("{")) return assignment();
        ++pos_;
        SyntaxNode list{"initializer_list", "", {}};
        while (!is("}") && !at_end()) {
            const auto before = pos_;
            list.children.push_back(initializer());
            if (!accept(",")) break;
            if (pos_ == before) list.children.push_back(error_token());
        }
        expect("}");
        return list;
    }

    // Declarators after the specifiers, up to and including ';'.
    void init_declarators(SyntaxNode& decl) {
        do {
            if (is(";")) break;
            auto d = declarator();
            if (accept("=")) {
                decl.children.push_back(node("init_declarator", {std::move(d), initializer()}));
            } else {
                decl.children.push_back(std::move(d));
            }
        } while (accept(","));
        expect(";");
    }

    SyntaxNode external_declaration() {
        auto specs = specifiers();
        if (is(";")) {
            ++pos_;
            return node("declaration", std::move(specs));
        }
        auto first = declarator();
        if (first.type == "function_declarator" && is("{")) {
            specs.push_back(std::move(first));
            specs.push_back(compound());
            return node("function_definition", std::move(specs));
        }
        SyntaxNode decl{"declaration", "", std::move(specs)};
        if (accept("=")) {
            decl.children.push_back(node("init_declarator", {std::move(first), initializer()}));
        } else {
            decl.children.push_back(std::move(first));
        }
        if (accept(",")) {
            init_declarators(decl);
        } else {
            expect(";");
        }
        return decl;
    }

    SyntaxNode local_declaration() {
        SyntaxNode decl{"declaration", "", specifiers()};
        init_declarators(decl);
        return decl;
    }

    SyntaxNode compound() {
        expect("{");
        SyntaxNode block{"compound_statement", "", {}};
        while (!is("}") && !at_end()) {
            const auto before = pos_;
            block.children.push_back(statement());
            if (pos_ == before) block.children.push_back(error_token());
        }
        expect("}");
        return block;
    }

    SyntaxNode paren_condition() {
        expect("(");
        auto e = expression();
        expect(")");
        return node("parenthesized_expression", {std::move(e)});
    }

    SyntaxNode statement() {
        if (is("{")) return compound();
        if (is(";")) {
            ++pos_;
            return leaf("expression_statement");
        }
        if (peek().kind == Tok::ident) {
            const auto w = peek().text;
            if (w == "if") {
                ++pos_;
                SyntaxNode s{"if_statement", "", {paren_condition(), statement()}};
                if (accept("else")) s.children.push_back(node("else_clause", {statement()}));
                return s;
            }
            if (w == "while") {
                ++pos_;
                auto cond = paren_condition();
                return node("while_statement", {std::move(cond), statement()});
            }
            if (w == "do") {
                ++pos_;
                auto body = statement();
                expect("while");
                auto cond = paren_condition();
                expect(";");
                return node("do_statement", {std::move(body), std::move(cond)});
            }
            if (w == "for") return for_statement();
            if (w == "return") {
                ++pos_;
                SyntaxNode s{"return_statement", "", {}};
                if (!is(";")) s.children.push_back(expression());
                expect(";");
                return s;
            }
            if (w == "break" || w == "continue") {
                ++pos_;
                expect(";");
                return leaf(w + "_statement");
            }
            if (w == "goto") {
                ++pos_;
                SyntaxNode s{"goto_statement", "", {}};
                if (ident_like()) s.children.push_back(leaf("statement_identifier", toks_[pos_++].text));
                expect(";");
                return s;
            }
            if (w == "switch") {
                ++pos_;
                auto cond = paren_condition();
                return node("switch_statement", {std::move(cond), compound()});
            }
            if (w == "case" || w == "default") {
                ++pos_;
                SyntaxNode s{"case_statement", "", {}};
                if (w == "case") s.children.push_back(conditional());
                expect(":");
                while (!is("}") && !is("case") && !is("default") && !at_end()) {
                    const auto before = pos_;
                    s.children.push_back(statement());
                    if (pos_ == before) s.children.push_back(error_token());
                }
                return s;
            }
            if (ident_like() && is(":", 1)) {
                auto label = leaf("statement_identifier", toks_[pos_].text);
                pos_ += 2;
                return node("labeled_statement", {std::move(label), statement()});
            }
            if (starts_declaration()) return local_declaration();
        }
        auto e = expression();
        expect(";");
        return node("expression_statement", {std::move(e)});
    }

    SyntaxNode for_statement() {
        ++pos_;
        expect("(");
        SyntaxNode s{"for_statement", "", {}};
        if (starts_declaration()) {
            s.children.push_back(local_declaration());
        } else {
            if (!is(";")) s.children.push_back(expression());
            expect(";");
        }
        if (!is(";")) s.children.push_back(expression());
        expect(";");
        if (!is(")")) s.children.push_back(expression());
        expect(")");
        s.children.push_back(statement());
        return s;
    }

    SyntaxNode expression() {
        auto e = assignment();
        if (!is(",")) return e;
        SyntaxNode comma{"comma_expression", "", {std::move(e)}};
        while (accept(",")) comma.children.push_back(assignment());
        return comma;
    }

    SyntaxNode assignment() {
        auto lhs = conditional();
        if (peek().kind == Tok::punct && assignment_op(peek().text)) {
            const auto op = toks_[pos_++].text;
            return node("assignment_expression", {std::move(lhs), assignment()}, op);
        }
        return lhs;
    }

    SyntaxNode conditional() {
        auto c = binary(1);
        if (!accept("?")) return c;
        auto a = expression();
        expect(":");
        return node("conditional_expression", {std::move(c), std::move(a), conditional()});
    }

    SyntaxNode binary(int min_prec) {
        auto lhs = unary();
        for (;;) {
            if (peek().kind != Tok::punct) return lhs;
            const int prec = binary_precedence(peek().text);
            if (prec == 0 || prec < min_prec) return lhs;
            const auto op = toks_[pos_++].text;
            auto rhs = binary(prec + 1);
            lhs = node("binary_expression", {std::move(lhs), std::move(rhs)}, op);
        }
    }

    bool cast_ahead() const {
        if (!is("(")) return false;
        const auto& t = peek(1);
        return t.kind == Tok::ident && (primitive_type(t.text) || type_qualifier(t.text) || tag_keyword(t.text));
    }

    SyntaxNode type_descriptor() {
        SyntaxNode d{"type_descriptor", "", specifiers()};
        SyntaxNode* tail = &d;
        while (accept("*")) {
            tail->children.push_back(node("abstract_pointer_declarator", {}));
            tail = &tail->children.back();
        }
        return d;
    }

    SyntaxNode unary() {
        if (peek().kind == Tok::punct) {
            const auto op = peek().text;
            if (op == "!" || op == "~" || op == "-" || op == "+") {
                ++pos_;
                return node("unary_expression", {unary()}, op);
            }
            if (op == "*" || op == "&") {
                ++pos_;
                return node("pointer_expression", {unary()}, op);
            }
            if (op == "++" || op == "--") {
                ++pos_;
                return node("update_expression", {unary()}, op);
            }
            if (cast_ahead()) {
                ++pos_;
                auto type = type_descriptor();
                expect(")");
                return node("cast_expression", {std::move(type), unary()});
            }
        }
        if (is("sizeof")) {
            ++pos_;
            if (cast_ahead()) {
                ++pos_;
                auto type = type_descriptor();
                expect(")");
                return node("sizeof_expression", {std::move(type)});
            }
            return node("sizeof_expression", {unary()});
        }
        return postfix();
    }

    SyntaxNode postfix() {
        auto e = primary();
        for (;;) {
            if (is("(")) {
                ++pos_;
                SyntaxNode args{"argument_list", "", {}};
                while (!is(")") && !at_end()) {
                    const auto before = pos_;
                    args.children.push_back(assignment());
                    if (!accept(",")) break;
                    if (pos_ == before) args.children.push_back(error_token());
                }
                expect(")");
                e = node("call_expression", {std::move(e), std::move(args)});
            } else if (accept("[")) {
                auto index = expression();
                expect("]");
                e = node("subscript_expression", {std::move(e), std::move(index)});
            } else if (is(".") || is("->")) {
                const auto op = toks_[pos_++].text;
                SyntaxNode field = ident_like() ? leaf("field_identifier", toks_[pos_++].text) : leaf("ERROR");
                if (field.type == "ERROR") errors_ = true;
                e = node("field_expression", {std::move(e), std::move(field)}, op);
            } else if (is("++") || is("--")) {
                const auto op = toks_[pos_++].text;
                e = node("update_expression", {std::move(e)}, op);
            } else {
                return e;
            }
        }
    }

    SyntaxNode primary() {
        const auto& t = peek();
        switch (t.kind) {
            case Tok::ident:
                if (statement_keyword(t.text) || specifier_word(t.text)) break;
                ++pos_;
                return leaf("identifier", t.text);
            case Tok::number:
                ++pos_;
                return leaf("number_literal", t.text);
            case Tok::string: {
                std::vector<SyntaxNode> parts;
                while (peek().kind == Tok::string) parts.push_back(leaf("string_literal", toks_[pos_++].text));
                if (parts.size() == 1) return std::move(parts.front());
                return node("concatenated_string", std::move(parts));
            }
            case Tok::chr:
                ++pos_;
                return leaf("char_literal", t.text);
            case Tok::punct:
                if (t.text == "(") {
                    ++pos_;
                    auto e = expression();
                    expect(")");
                    return node("parenthesized_expression", {std::move(e)});
                }
                break;
            case Tok::end:
                errors_ = true;
                return leaf("ERROR");
        }
        return error_token();
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool errors_ = false;
};

// Walks statements in source order, tracking which names hold a value.
class DataflowBuilder {
public:
    std::vector<DataflowEdge> run(const SyntaxNode& root) {
        visit(root);
        return std::move(edges_);
    }

private:
    void edge(const std::string& var, const char* relation, std::vector<std::string> sources) {
        if (sources.empty()) return;
        edges_.push_back({var, relation, std::move(sources)});
    }

    // Variables read by an expression, in order, without repeats.
    static void collect(const SyntaxNode& n, std::vector<std::string>& out) {
        if (n.type == "identifier") {
            if (std::find(out.begin(), out.end(), n.text) == out.end()) out.push_back(n.text);
            return;
        }
        if (n.type == "call_expression") {
            if (n.children[0].type != "identifier") collect(n.children[0], out);
            for (std::size_t i = 1; i < n.children.size(); ++i) collect(n.children[i], out);
            return;
        }
        if (n.type == "field_expression") {
            collect(n.children[0], out);
            return;
        }
        if (n.type == "type_descriptor") return;
        for (const auto& c : n.children) collect(c, out);
    }

    static const SyntaxNode* base_identifier(const SyntaxNode& n) {
        if (n.type == "identifier") return &n;
        if ((n.type == "subscript_expression" || n.type == "field_expression" || n.type == "pointer_expression" ||
             n.type == "parenthesized_expression") &&
            !n.children.empty())
            return base_identifier(n.children[0]);
        return nullptr;
    }

    static const SyntaxNode* declared_identifier(const SyntaxNode& d) {
        if (d.type == "identifier") return &d;
        if (d.children.empty()) return nullptr;
        if (d.type == "pointer_declarator") return declared_identifier(d.children.back());
        return declared_identifier(d.children.front());
    }

    void read(const SyntaxNode& n) {
        if (n.type == "identifier") {
            if (defined_.count(n.text)) edge(n.text, "comesFrom", {n.text});
            return;
        }
        if (n.type == "assignment_expression") {
            assign(n);
            return;
        }
        if (n.type == "update_expression") {
            if (const auto* id = base_identifier(n.children[0]); id && id == &n.children[0]) {
                read(n.children[0]);
                edge(id->text, "computedFrom", {id->text});
                defined_.insert(id->text);
            } else {
                read(n.children[0]);
            }
            return;
        }
        if (n.type == "call_expression") {
            if (n.children[0].type != "identifier") read(n.children[0]);
            for (std::size_t i = 1; i < n.children.size(); ++i) read(n.children[i]);
            return;
        }
        if (n.type == "field_expression") {
            read(n.children[0]);
            return;
        }
        if (n.type == "type_descriptor") return;
        for (const auto& c : n.children) read(c);
    }

    void assign(const SyntaxNode& n) {
        const auto& lhs = n.children[0];
        const auto& rhs = n.children[1];
        read(rhs);
        std::vector<std::string> sources;
        const auto* target = base_identifier(lhs);
        const bool plain = target == &lhs;
        if (!plain) read(lhs);
        if (target && (n.text != "=" || !plain)) sources.push_back(target->text);
        collect(rhs, sources);
        if (!target) return;
        edge(target->text, "computedFrom", std::move(sources));
        defined_.insert(target->text);
    }

    void declare(const SyntaxNode& d) {
        if (d.type == "init_declarator") {
            read(d.children[1]);
            std::vector<std::string> sources;
            collect(d.children[1], sources);
            if (const auto* id = declared_identifier(d.children[0])) {
                edge(id->text, "computedFrom", std::move(sources));
                defined_.insert(id->text);
            }
            return;
        }
        if (const auto* id = declared_identifier(d)) defined_.insert(id->text);
    }

    void visit(const SyntaxNode& n) {
        if (n.type == "declaration" || n.type == "parameter_declaration") {
            for (const auto& c : n.children) {
                if (c.type == "init_declarator" || c.type == "identifier" || c.type == "pointer_declarator" ||
                    c.type == "array_declarator") {
                    declare(c);
                } else if (c.type == "function_declarator") {
                    visit(c);
                }
            }
            return;
        }
        if (n.type == "function_definition" || n.type == "function_declarator" || n.type == "parameter_list" ||
            n.type == "translation_unit" || n.type == "compound_statement" || n.type == "else_clause" ||
            n.type == "labeled_statement" || n.type == "case_statement" || n.type == "if_statement" ||
            n.type == "while_statement" || n.type == "do_statement" || n.type == "for_statement" ||
            n.type == "switch_statement") {
            for (const auto& c : n.children) {
                if (c.type == "identifier" && n.type == "function_declarator") continue;  // function name
                visit(c);
            }
            return;
        }
        if (n.type.ends_with("_specifier") || n.type == "primitive_type" || n.type == "type_identifier" ||
            n.type == "statement_identifier")
            return;
        read(n);
    }

    std::vector<DataflowEdge> edges_;
    std::set<std::string, std::less<>> defined_;
};

}  // namespace

SyntaxTree CLikeGrammar::parse(std::string_view code, corpus::Language language) const {
    if (!supports(language)) return {SyntaxNode{"translation_unit", "", {}}, true};
    bool errors = false;
    auto tokens = lex(code, errors);
    return Parser(std::move(tokens), errors).run();
}

std::vector<DataflowEdge> CLikeGrammar::dataflow(const SyntaxTree& tree) const {
    return DataflowBuilder().run(tree.root);
}

}  // namespace curev::metrics
