#include "topos/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace topos {

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
    Ident,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Underscore,
    Dot,
    Colon,
    Equals,
    And,
    Or,
    Implies,
    Not,
    Box,
    Dia,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;
    int line = 1, col = 1;
    std::vector<Token> tokens;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void error(const std::string& what) const {
        std::ostringstream os;
        os << "parse error at " << line << ":" << col << ": " << what;
        fail(ErrorKind::ParseError, os.str());
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (pos < src.size() && src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        }
    }

    bool starts(const char* s) const {
        return src.compare(pos, std::char_traits<char>::length(s), s) == 0;
    }

    void push(Tok kind, std::size_t len, SourceSpan at) {
        at.end = int(pos + len);
        tokens.push_back(Token{kind, src.substr(pos, len), at});
        advance(len);
    }

    void run() {
        while (pos < src.size()) {
            char c = src[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
                continue;
            }
            SourceSpan at{int(pos), int(pos), line, col};
            if (starts("/\\")) { push(Tok::And, 2, at); continue; }
            if (starts("\\/")) { push(Tok::Or, 2, at); continue; }
            if (starts("->")) { push(Tok::Implies, 2, at); continue; }
            if (starts("[]")) { push(Tok::Box, 2, at); continue; }
            if (starts("<>")) { push(Tok::Dia, 2, at); continue; }
            switch (c) {
                case '(': push(Tok::LParen, 1, at); continue;
                case ')': push(Tok::RParen, 1, at); continue;
                case '{': push(Tok::LBrace, 1, at); continue;
                case '}': push(Tok::RBrace, 1, at); continue;
                case '_': push(Tok::Underscore, 1, at); continue;
                case '.': push(Tok::Dot, 1, at); continue;
                case ':': push(Tok::Colon, 1, at); continue;
                case '=': push(Tok::Equals, 1, at); continue;
                case '~': push(Tok::Not, 1, at); continue;
                default: break;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t len = 1;
                while (pos + len < src.size()) {
                    char d = src[pos + len];
                    if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'')
                        ++len;
                    else
                        break;
                }
                push(Tok::Ident, len, at);
                continue;
            }
            error(std::string("unexpected character '") + c + "'");
        }
        tokens.push_back(Token{Tok::End, "", SourceSpan{int(pos), int(pos), line, col}});
    }
};

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    std::vector<Token> toks;
    std::size_t at = 0;

    const Token& peek() const { return toks[at]; }
    Token take() { return toks[at++]; }

    [[noreturn]] void error(const std::string& what) const {
        const Token& t = peek();
        std::ostringstream os;
        os << "parse error at " << t.span.line << ":" << t.span.col << ": " << what;
        if (t.kind != Tok::End) os << " (found '" << t.text << "')";
        fail(ErrorKind::ParseError, os.str());
    }

    Token expect(Tok kind, const char* what) {
        if (peek().kind != kind) error(std::string("expected ") + what);
        return take();
    }

    FormulaPtr formula() { return implies(); }

    FormulaPtr implies() {
        FormulaPtr a = disj();
        if (peek().kind == Tok::Implies) {
            take();
            FormulaPtr b = implies();  // right associative
            auto f = std::make_shared<Formula>();
            f->kind = FKind::Implies;
            f->span = a->span;
            f->lhs = a;
            f->rhs = b;
            return f;
        }
        return a;
    }

    FormulaPtr disj() {
        FormulaPtr a = conj();
        while (peek().kind == Tok::Or) {
            take();
            FormulaPtr b = conj();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::Or;
            f->span = a->span;
            f->lhs = a;
            f->rhs = b;
            a = f;
        }
        return a;
    }

    FormulaPtr conj() {
        FormulaPtr a = unary();
        while (peek().kind == Tok::And) {
            take();
            FormulaPtr b = unary();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::And;
            f->span = a->span;
            f->lhs = a;
            f->rhs = b;
            a = f;
        }
        return a;
    }

    FormulaPtr unary() {
        const Token& t = peek();
        if (t.kind == Tok::Not) {
            Token op = take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::Not;
            f->span = op.span;
            f->lhs = unary();
            return f;
        }
        if (t.kind == Tok::Box || t.kind == Tok::Dia) {
            Token op = take();
            auto f = std::make_shared<Formula>();
            f->kind = t.kind == Tok::Box ? FKind::Box : FKind::Dia;
            f->span = op.span;
            // {R} qualifier and _x annotation, in either order
            while (peek().kind == Tok::LBrace || peek().kind == Tok::Underscore) {
                if (peek().kind == Tok::LBrace) {
                    take();
                    if (!f->relation.empty()) error("duplicate relation qualifier");
                    f->relation = expect(Tok::Ident, "relation name").text;
                    expect(Tok::RBrace, "'}'");
                } else {
                    take();
                    if (!f->modal_var.empty()) error("duplicate variable annotation");
                    f->modal_var = expect(Tok::Ident, "variable name").text;
                }
            }
            f->lhs = unary();
            return f;
        }
        if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
            Token q = take();
            auto f = std::make_shared<Formula>();
            f->kind = q.text == "forall" ? FKind::Forall : FKind::Exists;
            f->span = q.span;
            f->var = expect(Tok::Ident, "variable name").text;
            expect(Tok::Colon, "':'");
            f->sort = expect(Tok::Ident, "sort name").text;
            expect(Tok::Dot, "'.'");
            f->lhs = implies();  // body extends maximally to the right
            return f;
        }
        return atom();
    }

    FormulaPtr atom() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            take();
            FormulaPtr f = implies();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident) error("expected a formula");
        Token id = take();
        auto f = std::make_shared<Formula>();
        f->span = id.span;
        if (id.text == "true") {
            f->kind = FKind::True;
            return f;
        }
        if (id.text == "false") {
            f->kind = FKind::False;
            return f;
        }
        if (peek().kind == Tok::LParen) {
            take();
            Token arg = expect(Tok::Ident, "variable name");
            expect(Tok::RParen, "')'");
            if (id.text == "E") {
                f->kind = FKind::ExistsE;
                f->term = arg.text;
            } else {
                f->kind = FKind::Atom;
                f->atom = id.text;
                f->term = arg.text;
            }
            return f;
        }
        if (peek().kind == Tok::Equals) {
            take();
            Token rhs = expect(Tok::Ident, "variable name");
            f->kind = FKind::Eq;
            f->term = id.text;
            f->term2 = rhs.text;
            return f;
        }
        error("expected '(' or '=' after identifier '" + id.text + "'");
    }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
    Lexer lx(text);
    lx.run();
    Parser ps{std::move(lx.tokens)};
    FormulaPtr f = ps.formula();
    if (ps.peek().kind != Tok::End) ps.error("trailing input after formula");
    return f;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// precedence levels: quantifier 0, -> 1, \/ 2, /\ 3, unary 4, atomic 5
int level_of(const Formula& f) {
    switch (f.kind) {
        case FKind::Forall:
        case FKind::Exists: return 0;
        case FKind::Implies: return 1;
        case FKind::Or: return 2;
        case FKind::And: return 3;
        case FKind::Not:
        case FKind::Box:
        case FKind::Dia: return 4;
        default: return 5;
    }
}

void print_rec(const Formula& f, int min_level, std::string& out) {
    bool parens = level_of(f) < min_level;
    if (parens) out += "(";
    switch (f.kind) {
        case FKind::True: out += "true"; break;
        case FKind::False: out += "false"; break;
        case FKind::Atom: out += f.atom + "(" + f.term + ")"; break;
        case FKind::Eq: out += f.term + " = " + f.term2; break;
        case FKind::ExistsE: out += "E(" + f.term + ")"; break;
        case FKind::And:
            print_rec(*f.lhs, 3, out);
            out += " /\\ ";
            print_rec(*f.rhs, 4, out);
            break;
        case FKind::Or:
            print_rec(*f.lhs, 2, out);
            out += " \\/ ";
            print_rec(*f.rhs, 3, out);
            break;
        case FKind::Implies:
            print_rec(*f.lhs, 2, out);
            out += " -> ";
            print_rec(*f.rhs, 1, out);
            break;
        case FKind::Not:
            out += "~";
            print_rec(*f.lhs, 4, out);
            break;
        case FKind::Box:
        case FKind::Dia:
            out += f.kind == FKind::Box ? "[]" : "<>";
            if (!f.relation.empty()) out += "{" + f.relation + "}";
            if (!f.modal_var.empty()) out += "_" + f.modal_var;
            out += " ";
            print_rec(*f.lhs, 4, out);
            break;
        case FKind::Forall:
        case FKind::Exists:
            out += f.kind == FKind::Forall ? "forall " : "exists ";
            out += f.var + ":" + f.sort + ". ";
            print_rec(*f.lhs, 0, out);
            break;
    }
    if (parens) out += ")";
}

}  // namespace

std::string print_formula(const Formula& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

bool formula_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.atom != b.atom || a.term != b.term || a.term2 != b.term2 ||
        a.relation != b.relation || a.modal_var != b.modal_var || a.var != b.var ||
        a.sort != b.sort)
        return false;
    if (bool(a.lhs) != bool(b.lhs) || bool(a.rhs) != bool(b.rhs)) return false;
    if (a.lhs && !formula_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !formula_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

// builders

static FormulaPtr mk(FKind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

FormulaPtr f_true() { return mk(FKind::True); }
FormulaPtr f_false() { return mk(FKind::False); }

FormulaPtr f_atom(std::string name, std::string term) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Atom;
    f->atom = std::move(name);
    f->term = std::move(term);
    return f;
}

FormulaPtr f_eq(std::string t, std::string u) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Eq;
    f->term = std::move(t);
    f->term2 = std::move(u);
    return f;
}

FormulaPtr f_existse(std::string t) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::ExistsE;
    f->term = std::move(t);
    return f;
}

static FormulaPtr binop(FKind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return binop(FKind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return binop(FKind::Or, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
    return binop(FKind::Implies, std::move(a), std::move(b));
}

FormulaPtr f_not(FormulaPtr a) {
    auto f = mk(FKind::Not);
    const_cast<Formula&>(*f).lhs = std::move(a);
    return f;
}

FormulaPtr f_box(FormulaPtr a, std::string relation, std::string var) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Box;
    f->lhs = std::move(a);
    f->relation = std::move(relation);
    f->modal_var = std::move(var);
    return f;
}

FormulaPtr f_dia(FormulaPtr a, std::string relation, std::string var) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Dia;
    f->lhs = std::move(a);
    f->relation = std::move(relation);
    f->modal_var = std::move(var);
    return f;
}

FormulaPtr f_forall(std::string var, std::string sort, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Forall;
    f->var = std::move(var);
    f->sort = std::move(sort);
    f->lhs = std::move(body);
    return f;
}

FormulaPtr f_exists(std::string var, std::string sort, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Exists;
    f->var = std::move(var);
    f->sort = std::move(sort);
    f->lhs = std::move(body);
    return f;
}

// ---------------------------------------------------------------------------
// Resolution: sorts, atoms, modalities; desugars E(t)

namespace {

struct RNode {
    FKind kind;
    const SubPresheaf* atom = nullptr;
    std::string term, term2;
    std::unique_ptr<RNode> lhs, rhs;
    const InternalRelation* rel = nullptr;
    std::string modal_var;  // empty on Box/Dia means identity mode
    std::string var;
    const Presheaf* sort = nullptr;
};

struct Scope {
    std::vector<std::pair<std::string, const Presheaf*>> bound;

    const Presheaf* lookup(const std::string& v) const {
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
            if (it->first == v) return it->second;
        return nullptr;
    }
};

struct Resolver {
    const EvalModel& m;
    std::map<std::string, const Presheaf*> free_sorts{};
    std::vector<std::string> free_order{};
    int fresh = 0;

    const Presheaf* sort_by_name(const std::string& name) {
        auto it = m.sorts.find(name);
        if (it == m.sorts.end()) fail(ErrorKind::UnknownSort, "unknown sort '" + name + "'");
        return it->second;
    }

    const SubPresheaf* atom_by_name(const std::string& name) {
        auto it = m.atoms.find(name);
        if (it == m.atoms.end()) fail(ErrorKind::UnknownAtom, "unknown atom '" + name + "'");
        return it->second;
    }

    void note_free(const std::string& v) {
        if (std::find(free_order.begin(), free_order.end(), v) == free_order.end())
            free_order.push_back(v);
    }

    void constrain(const std::string& v, const Presheaf* s, bool& changed) {
        auto it = free_sorts.find(v);
        if (it == free_sorts.end()) {
            free_sorts[v] = s;
            changed = true;
        } else if (it->second != s) {
            fail(ErrorKind::SortError, "variable '" + v + "' used at two different sorts");
        }
    }

    // one inference pass; repeated until stable to let Eq chains propagate
    void infer(const Formula& f, Scope& sc, bool& changed) {
        switch (f.kind) {
            case FKind::Atom: {
                const SubPresheaf* a = atom_by_name(f.atom);
                if (const Presheaf* s = sc.lookup(f.term)) {
                    if (s != a->of)
                        fail(ErrorKind::SortError,
                             "argument '" + f.term + "' of '" + f.atom + "' has the wrong sort");
                } else {
                    note_free(f.term);
                    constrain(f.term, a->of, changed);
                }
                break;
            }
            case FKind::Eq:
            case FKind::ExistsE: {
                std::vector<std::string> terms{f.term};
                if (f.kind == FKind::Eq) terms.push_back(f.term2);
                const Presheaf* known = nullptr;
                for (const auto& t : terms) {
                    if (const Presheaf* s = sc.lookup(t))
                        known = s;
                    else if (free_sorts.count(t))
                        known = free_sorts[t];
                }
                for (const auto& t : terms) {
                    if (sc.lookup(t)) {
                        if (known && sc.lookup(t) != known)
                            fail(ErrorKind::SortError, "equated terms of different sorts");
                        continue;
                    }
                    note_free(t);
                    if (known) constrain(t, known, changed);
                }
                break;
            }
            case FKind::Forall:
            case FKind::Exists: {
                sc.bound.emplace_back(f.var, sort_by_name(f.sort));
                infer(*f.lhs, sc, changed);
                sc.bound.pop_back();
                break;
            }
            default:
                if (f.lhs) infer(*f.lhs, sc, changed);
                if (f.rhs) infer(*f.rhs, sc, changed);
        }
    }

    const Presheaf* term_sort(const std::string& t, const Scope& sc) {
        if (const Presheaf* s = sc.lookup(t)) return s;
        auto it = free_sorts.find(t);
        if (it != free_sorts.end()) return it->second;
        fail(ErrorKind::SortError, "cannot infer the sort of variable '" + t + "'");
    }

    // free variables of a resolved subtree
    void free_vars(const RNode& n, std::vector<std::string>& bound,
                   std::vector<std::pair<std::string, const Presheaf*>>& out,
                   const Scope& sc) {
        auto add = [&](const std::string& t) {
            if (std::find(bound.begin(), bound.end(), t) != bound.end()) return;
            for (auto& [v, s] : out)
                if (v == t) return;
            out.emplace_back(t, term_sort(t, sc));
        };
        switch (n.kind) {
            case FKind::Atom: add(n.term); break;
            case FKind::Eq:
                add(n.term);
                add(n.term2);
                break;
            case FKind::Forall:
            case FKind::Exists:
                bound.push_back(n.var);
                free_vars(*n.lhs, bound, out, sc);
                bound.pop_back();
                break;
            default:
                if (n.lhs) free_vars(*n.lhs, bound, out, sc);
                if (n.rhs) free_vars(*n.rhs, bound, out, sc);
        }
    }

    const InternalRelation* resolve_relation(const std::string& qualifier) {
        if (!qualifier.empty()) {
            auto it = m.relations.find(qualifier);
            if (it == m.relations.end())
                fail(ErrorKind::UnknownRelation, "unknown relation '" + qualifier + "'");
            return it->second;
        }
        if (m.relations.empty()) fail(ErrorKind::UnknownRelation, "the model declares no relation");
        if (m.relations.size() > 1)
            fail(ErrorKind::AmbiguousModality,
                 "several relations are declared; qualify the modality as []{name} / <>{name}");
        return m.relations.begin()->second;
    }

    std::unique_ptr<RNode> resolve(const Formula& f, Scope& sc) {
        auto n = std::make_unique<RNode>();
        n->kind = f.kind;
        switch (f.kind) {
            case FKind::True:
            case FKind::False: break;
            case FKind::Atom:
                n->atom = atom_by_name(f.atom);
                n->term = f.term;
                term_sort(f.term, sc);
                break;
            case FKind::Eq: {
                n->term = f.term;
                n->term2 = f.term2;
                const Presheaf* s1 = term_sort(f.term, sc);
                const Presheaf* s2 = term_sort(f.term2, sc);
                if (s1 != s2) fail(ErrorKind::SortError, "equated terms of different sorts");
                break;
            }
            case FKind::ExistsE: {
                // E(t) := exists y. t = y at the sort of t
                const Presheaf* s = term_sort(f.term, sc);
                n->kind = FKind::Exists;
                n->var = "e$" + std::to_string(fresh++);
                n->sort = s;
                auto eq = std::make_unique<RNode>();
                eq->kind = FKind::Eq;
                eq->term = f.term;
                eq->term2 = n->var;
                n->lhs = std::move(eq);
                break;
            }
            case FKind::And:
            case FKind::Or:
            case FKind::Implies:
                n->lhs = resolve(*f.lhs, sc);
                n->rhs = resolve(*f.rhs, sc);
                break;
            case FKind::Not: n->lhs = resolve(*f.lhs, sc); break;
            case FKind::Box:
            case FKind::Dia: {
                n->rel = resolve_relation(f.relation);
                n->lhs = resolve(*f.lhs, sc);
                std::vector<std::string> bound;
                std::vector<std::pair<std::string, const Presheaf*>> fv;
                free_vars(*n->lhs, bound, fv, sc);
                std::vector<std::string> candidates;
                for (auto& [v, s] : fv)
                    if (s == n->rel->on) candidates.push_back(v);
                if (!f.modal_var.empty()) {
                    if (std::find(candidates.begin(), candidates.end(), f.modal_var) ==
                        candidates.end())
                        fail(ErrorKind::AmbiguousModality,
                             "'" + f.modal_var +
                                 "' is not a free variable of the modal sort in the body");
                    n->modal_var = f.modal_var;
                } else if (candidates.size() == 1) {
                    n->modal_var = candidates[0];
                } else if (candidates.size() > 1) {
                    fail(ErrorKind::AmbiguousModality,
                         "modality body has several free variables of the modal sort; "
                         "annotate as []_x / <>_x");
                }
                // no candidates: the body is closed in the modal sort and the
                // operator acts as the identity
                break;
            }
            case FKind::Forall:
            case FKind::Exists:
                n->var = f.var;
                n->sort = sort_by_name(f.sort);
                sc.bound.emplace_back(f.var, n->sort);
                n->lhs = resolve(*f.lhs, sc);
                sc.bound.pop_back();
                break;
        }
        return n;
    }
};

// ---------------------------------------------------------------------------
// Evaluation over a variable context

struct Ctx {
    std::vector<std::string> vars;
    std::vector<const Presheaf*> sorts;
    std::shared_ptr<const Product> prod;
};

Ctx make_ctx(const FinPoset& p, std::vector<std::string> vars,
             std::vector<const Presheaf*> sorts) {
    std::string label = "ctx(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) label += ",";
        label += vars[i];
    }
    label += ")";
    auto prod = std::make_shared<Product>(product_over(p, sorts, label));
    return Ctx{std::move(vars), std::move(sorts), std::move(prod)};
}

int var_coord(const Ctx& ctx, const std::string& v) {
    for (std::size_t i = ctx.vars.size(); i-- > 0;)
        if (ctx.vars[i] == v) return int(i);
    fail(ErrorKind::UnboundVariable, "variable '" + v + "' is not in scope");
}

SubPresheaf eval(const RNode& n, const Ctx& ctx);

SubPresheaf eval_quantifier(const RNode& n, const Ctx& ctx) {
    const FinPoset& p = ctx.prod->ps.base();
    std::vector<std::string> vars2 = ctx.vars;
    std::vector<const Presheaf*> sorts2 = ctx.sorts;
    vars2.push_back(n.var);
    sorts2.push_back(n.sort);
    Ctx inner = make_ctx(p, std::move(vars2), std::move(sorts2));
    SubPresheaf body = eval(*n.lhs, inner);

    const Presheaf& y = *n.sort;
    SubPresheaf out = SubPresheaf::none(ctx.prod->ps);
    for (int c = 0; c < p.size(); ++c) {
        for (int t = 0; t < ctx.prod->ps.fiber_size(c); ++t) {
            std::vector<int> tuple = ctx.prod->decode(c, t);
            if (n.kind == FKind::Forall) {
                bool in = true;
                for (int d = 0; d < p.size() && in; ++d) {
                    if (!p.leq(d, c)) continue;
                    std::vector<int> td(tuple.size());
                    for (std::size_t k = 0; k < tuple.size(); ++k)
                        td[k] = ctx.sorts[k]->restricted(c, tuple[k], d);
                    td.push_back(0);
                    for (int b = 0; b < y.fiber_size(d); ++b) {
                        td.back() = b;
                        if (!body.members[d].test(inner.prod->encode(d, td))) {
                            in = false;
                            break;
                        }
                    }
                }
                if (in) out.members[c].set(t);
            } else {
                std::vector<int> tb = tuple;
                tb.push_back(0);
                for (int b = 0; b < y.fiber_size(c); ++b) {
                    tb.back() = b;
                    if (body.members[c].test(inner.prod->encode(c, tb))) {
                        out.members[c].set(t);
                        break;
                    }
                }
            }
        }
    }
    return out;
}

SubPresheaf eval_modality(const RNode& n, const Ctx& ctx) {
    SubPresheaf body = eval(*n.lhs, ctx);
    if (n.modal_var.empty()) return body;  // closed in the modal sort

    const FinPoset& p = ctx.prod->ps.base();
    const InternalRelation& r = *n.rel;
    int coord = var_coord(ctx, n.modal_var);
    SubPresheaf out = SubPresheaf::none(ctx.prod->ps);
    for (int c = 0; c < p.size(); ++c)
        for (int t = 0; t < ctx.prod->ps.fiber_size(c); ++t) {
            std::vector<int> tuple = ctx.prod->decode(c, t);
            if (n.kind == FKind::Box) {
                bool in = true;
                for (int d = 0; d < p.size() && in; ++d) {
                    if (!p.leq(d, c)) continue;
                    std::vector<int> td(tuple.size());
                    for (std::size_t k = 0; k < tuple.size(); ++k)
                        td[k] = ctx.sorts[k]->restricted(c, tuple[k], d);
                    int ad = td[coord];
                    for (int b = r.adj[d][ad].first(); b >= 0; b = r.adj[d][ad].next(b)) {
                        td[coord] = b;
                        if (!body.members[d].test(ctx.prod->encode(d, td))) {
                            in = false;
                            break;
                        }
                    }
                }
                if (in) out.members[c].set(t);
            } else {
                int a = tuple[coord];
                std::vector<int> tb = tuple;
                for (int b = r.adj[c][a].first(); b >= 0; b = r.adj[c][a].next(b)) {
                    tb[coord] = b;
                    if (body.members[c].test(ctx.prod->encode(c, tb))) {
                        out.members[c].set(t);
                        break;
                    }
                }
            }
        }
    return out;
}

SubPresheaf eval(const RNode& n, const Ctx& ctx) {
    switch (n.kind) {
        case FKind::True: return SubPresheaf::full(ctx.prod->ps);
        case FKind::False: return SubPresheaf::none(ctx.prod->ps);
        case FKind::Atom: {
            const FinPoset& p = ctx.prod->ps.base();
            int coord = var_coord(ctx, n.term);
            SubPresheaf out = SubPresheaf::none(ctx.prod->ps);
            for (int c = 0; c < p.size(); ++c)
                for (int t = 0; t < ctx.prod->ps.fiber_size(c); ++t)
                    if (n.atom->members[c].test(ctx.prod->decode(c, t)[coord]))
                        out.members[c].set(t);
            return out;
        }
        case FKind::Eq: {
            const FinPoset& p = ctx.prod->ps.base();
            int i = var_coord(ctx, n.term), j = var_coord(ctx, n.term2);
            SubPresheaf out = SubPresheaf::none(ctx.prod->ps);
            for (int c = 0; c < p.size(); ++c)
                for (int t = 0; t < ctx.prod->ps.fiber_size(c); ++t) {
                    auto tuple = ctx.prod->decode(c, t);
                    if (tuple[i] == tuple[j]) out.members[c].set(t);
                }
            return out;
        }
        case FKind::And: return sub_meet(eval(*n.lhs, ctx), eval(*n.rhs, ctx));
        case FKind::Or: return sub_join(eval(*n.lhs, ctx), eval(*n.rhs, ctx));
        case FKind::Implies: return sub_implies(eval(*n.lhs, ctx), eval(*n.rhs, ctx));
        case FKind::Not: return sub_neg(eval(*n.lhs, ctx));
        case FKind::Box:
        case FKind::Dia: return eval_modality(n, ctx);
        case FKind::Forall:
        case FKind::Exists: return eval_quantifier(n, ctx);
        case FKind::ExistsE: break;  // desugared during resolution
    }
    fail(ErrorKind::InvalidModel, "unreachable formula node");
}

}  // namespace

Interpretation interpret(const Formula& f, const EvalModel& m) {
    Resolver rs{m};
    // inference to a fixpoint so Eq chains can propagate sorts
    bool changed = true;
    while (changed) {
        changed = false;
        Scope sc;
        rs.infer(f, sc, changed);
    }
    // single-sorted models determine otherwise-unconstrained free variables
    for (const auto& v : rs.free_order)
        if (!rs.free_sorts.count(v)) {
            if (m.sorts.size() == 1)
                rs.free_sorts[v] = m.sorts.begin()->second;
            else
                fail(ErrorKind::SortError, "cannot infer the sort of variable '" + v + "'");
        }
    Scope sc;
    auto resolved = rs.resolve(f, sc);

    std::vector<std::string> vars;
    std::vector<const Presheaf*> sorts;
    for (const auto& v : rs.free_order) {
        auto it = rs.free_sorts.find(v);
        if (it == rs.free_sorts.end())
            fail(ErrorKind::SortError, "cannot infer the sort of variable '" + v + "'");
        vars.push_back(v);
        sorts.push_back(it->second);
    }
    Ctx ctx = make_ctx(*m.poset, vars, sorts);
    SubPresheaf value = eval(*resolved, ctx);

    Interpretation out;
    out.vars = std::move(vars);
    out.sorts = std::move(sorts);
    out.context = ctx.prod;
    out.value = std::move(value);
    return out;
}

ForceResult force(const Formula& f, const EvalModel& m, int stage,
                  const std::map<std::string, std::string>& env) {
    Interpretation in = interpret(f, m);
    const FinPoset& p = *m.poset;
    if (stage < 0 || stage >= p.size()) fail(ErrorKind::UnknownObject, "stage out of range");
    std::vector<int> tuple;
    for (std::size_t k = 0; k < in.vars.size(); ++k) {
        auto it = env.find(in.vars[k]);
        if (it == env.end())
            fail(ErrorKind::UnboundVariable,
                 "no binding for free variable '" + in.vars[k] + "'");
        tuple.push_back(in.sorts[k]->elem_index(stage, it->second));
    }
    int t = in.context->encode(stage, tuple);
    ForceResult out;
    out.value = sieve_empty(p, stage);
    for (int d = 0; d < p.size(); ++d)
        if (p.leq(d, stage) && in.value.members[d].test(in.context->ps.restricted(stage, t, d)))
            out.value.members.set(d);
    out.forced = sieve_is_total(p, out.value);
    return out;
}

std::vector<Sieve> stage_values(const Formula& f, const EvalModel& m) {
    Interpretation in = interpret(f, m);
    if (!in.vars.empty())
        fail(ErrorKind::UnboundVariable,
             "formula has free variables; bind them with --env or quantify");
    const FinPoset& p = *m.poset;
    std::vector<Sieve> out;
    for (int c = 0; c < p.size(); ++c) {
        Sieve s = sieve_empty(p, c);
        for (int d = 0; d < p.size(); ++d)
            if (p.leq(d, c) && in.value.members[d].test(0)) s.members.set(d);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Barcan / actuality report

const BarcanRow* BarcanReport::find(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return &r;
    return nullptr;
}

static std::string sort_name_for(const EvalModel& m, const Presheaf* ps) {
    for (const auto& [name, s] : m.sorts)
        if (s == ps) return name;
    fail(ErrorKind::UnknownSort, "the atom's sort is not a declared sort");
}

BarcanReport barcan_report(const EvalModel& m, const std::string& relation,
                           const std::string& phi_atom) {
    auto rit = m.relations.find(relation);
    if (rit == m.relations.end())
        fail(ErrorKind::UnknownRelation, "unknown relation '" + relation + "'");
    auto ait = m.atoms.find(phi_atom);
    if (ait == m.atoms.end()) fail(ErrorKind::UnknownAtom, "unknown atom '" + phi_atom + "'");
    if (rit->second->on != ait->second->of)
        fail(ErrorKind::BaseMismatch, "relation '" + relation + "' does not live on the sort of '" +
                                          phi_atom + "'");
    std::string sort = sort_name_for(m, ait->second->of);

    auto phi = [&](const char* v) { return f_atom(phi_atom, v); };
    auto box = [&](FormulaPtr b) { return f_box(std::move(b), relation); };
    auto dia = [&](FormulaPtr b) { return f_dia(std::move(b), relation); };
    auto all = [&](FormulaPtr b) { return f_forall("x", sort, std::move(b)); };
    auto some = [&](FormulaPtr b) { return f_exists("x", sort, std::move(b)); };

    BarcanReport rep;
    rep.relation = relation;
    rep.phi = phi_atom;

    auto add = [&](const std::string& name, FormulaPtr lhs, FormulaPtr rhs) {
        BarcanRow row;
        row.name = name;
        FormulaPtr impl = f_implies(lhs, rhs);
        row.text = print_formula(*impl);
        row.lhs = stage_values(*lhs, m);
        row.rhs = stage_values(*rhs, m);
        row.implication = stage_values(*impl, m);
        row.valid = true;
        const FinPoset& p = *m.poset;
        for (int c = 0; c < p.size(); ++c)
            if (!sieve_is_total(p, row.implication[c])) row.valid = false;
        rep.rows.push_back(std::move(row));
    };

    add("barcan_forall", all(box(phi("x"))), box(all(phi("x"))));
    add("barcan_exists", some(box(phi("x"))), box(some(phi("x"))));
    add("dia_forall", dia(all(phi("x"))), all(dia(phi("x"))));
    add("dia_exists", dia(some(phi("x"))), some(dia(phi("x"))));
    add("conv_barcan_forall", box(all(phi("x"))), all(box(phi("x"))));
    add("conv_barcan_exists", box(some(phi("x"))), some(box(phi("x"))));
    add("conv_dia_forall", all(dia(phi("x"))), dia(all(phi("x"))));
    add("exists_dia_exists", some(dia(phi("x"))), some(phi("x")));

    // actualist schema against the supplied atom, and the always-true
    // existence-predicate instance for contrast
    {
        BarcanRow row;
        row.name = "actualist";
        FormulaPtr inner = f_implies(dia(phi("x")), phi("x"));
        FormulaPtr whole = all(inner);
        row.text = print_formula(*whole);
        row.implication = stage_values(*whole, m);
        row.valid = true;
        for (int c = 0; c < m.poset->size(); ++c)
            if (!sieve_is_total(*m.poset, row.implication[c])) row.valid = false;
        rep.rows.push_back(std::move(row));
    }
    {
        BarcanRow row;
        row.name = "actualist_existence";
        FormulaPtr whole = all(f_implies(dia(f_existse("x")), f_existse("x")));
        row.text = print_formula(*whole);
        row.implication = stage_values(*whole, m);
        row.valid = true;
        for (int c = 0; c < m.poset->size(); ++c)
            if (!sieve_is_total(*m.poset, row.implication[c])) row.valid = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

SetLevelReport eval_set_level(const EvalModel& m) {
    if (m.poset->size() != 1)
        fail(ErrorKind::WrongBase, "the Set-level check needs a one-object base");
    if (m.relations.empty()) fail(ErrorKind::UnknownRelation, "no relation declared");
    const std::string rel = m.relations.begin()->first;
    std::string phi;
    if (m.atoms.count("phi"))
        phi = "phi";
    else if (m.atoms.size() == 1)
        phi = m.atoms.begin()->first;
    else
        fail(ErrorKind::UnknownAtom, "declare an atom named 'phi' or exactly one atom");
    const SubPresheaf* sub = m.atoms.at(phi);
    if (m.relations.at(rel)->on != sub->of)
        fail(ErrorKind::BaseMismatch, "relation and atom sorts differ");
    std::string sort = sort_name_for(m, sub->of);

    SetLevelReport rep;
    rep.relation = rel;
    rep.phi = phi;

    FormulaPtr exists_phi = f_exists("x", sort, f_atom(phi, "x"));
    rep.exists_phi = sieve_is_total(*m.poset, stage_values(*exists_phi, m)[0]);

    Interpretation box = interpret(*f_box(f_atom(phi, "x"), rel), m);
    for (int a = box.value.members[0].first(); a >= 0; a = box.value.members[0].next(a))
        rep.box_members.push_back(sub->of->elem_name(0, a));

    FormulaPtr exists_box = f_exists("x", sort, f_box(f_atom(phi, "x"), rel));
    rep.exists_box = sieve_is_total(*m.poset, stage_values(*exists_box, m)[0]);
    return rep;
}

}  // namespace topos
