#include "nambd/spacepi.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include "nambd/text.hpp"

namespace nambd::spacepi {

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok {
    Ident,
    Number,
    Assign,  // :=
    Equals,
    Caret,
    Prime,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Bar,
    Plus,
    Minus,
    Query,
    Bang,
    Tilde,
    Less,
    SuchThat,  // s.t.
    End,
};

struct Token {
    Tok type;
    std::string text;
    double number = 0.0;
    int col = 0;
};

// ASCII canonical forms for the typeset symbols the notation allows.
std::string normalize_aliases(std::string s) {
    const std::pair<const char*, const char*> subs[] = {
        {"\xE2\x88\xA7", "^"},    // wedge
        {"\xE2\x89\x94", ":="},   // colon-equals
        {"\xC2\xB2", "^2"},       // superscript two
        {"\xE2\x88\xBC", "~"},    // tilde operator
    };
    for (const auto& [from, to] : subs) {
        size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, std::strlen(from), to);
            pos += std::strlen(to);
        }
    }
    return s;
}

std::vector<Token> lex_line(const std::string& raw, int line_no) {
    const std::string s = normalize_aliases(raw);
    std::vector<Token> out;
    size_t i = 0;
    const auto fail = [&](const std::string& msg, size_t at) {
        throw SyntaxError(msg, SourceLoc{line_no, static_cast<int>(at) + 1});
    };
    while (i < s.size()) {
        const char c = s[i];
        const int col = static_cast<int>(i) + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (s.compare(i, 4, "s.t.") == 0) {
            out.push_back({Tok::SuchThat, "s.t.", 0.0, col});
            i += 4;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str() + i, &end);
            out.push_back({Tok::Number, s.substr(i, end - (s.c_str() + i)), v, col});
            i = end - s.c_str();
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), 0.0, col});
            i = j;
            continue;
        }
        if (s.compare(i, 2, ":=") == 0) {
            out.push_back({Tok::Assign, ":=", 0.0, col});
            i += 2;
            continue;
        }
        const auto single = [&](Tok t) {
            out.push_back({t, std::string(1, c), 0.0, col});
            ++i;
        };
        switch (c) {
            case '=': single(Tok::Equals); break;
            case '^': single(Tok::Caret); break;
            case '\'': single(Tok::Prime); break;
            case '(': single(Tok::LParen); break;
            case ')': single(Tok::RParen); break;
            case '[': single(Tok::LBracket); break;
            case ']': single(Tok::RBracket); break;
            case ',': single(Tok::Comma); break;
            case '.': single(Tok::Dot); break;
            case '|': single(Tok::Bar); break;
            case '+': single(Tok::Plus); break;
            case '-': single(Tok::Minus); break;
            case '?': single(Tok::Query); break;
            case '!': single(Tok::Bang); break;
            case '~': single(Tok::Tilde); break;
            case '<': single(Tok::Less); break;
            default: fail("unexpected character '" + std::string(1, c) + "'", i);
        }
    }
    out.push_back({Tok::End, "", 0.0, static_cast<int>(s.size()) + 1});
    return out;
}

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::Assign: return "':='";
        case Tok::Equals: return "'='";
        case Tok::Caret: return "'^'";
        case Tok::Prime: return "'''";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::Bar: return "'|'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Query: return "'?'";
        case Tok::Bang: return "'!'";
        case Tok::Tilde: return "'~'";
        case Tok::Less: return "'<'";
        case Tok::SuchThat: return "'s.t.'";
        case Tok::End: return "end of line";
    }
    return "?";
}

struct LineParser {
    std::vector<Token> tokens;
    size_t i = 0;
    int line;

    LineParser(const std::string& text, int line_no)
        : tokens(lex_line(text, line_no)), line(line_no) {}

    const Token& peek() const { return tokens[i]; }
    const Token& get() { return tokens[i + 1 < tokens.size() ? i++ : i]; }

    bool accept(Tok t) {
        if (peek().type != t) return false;
        get();
        return true;
    }

    const Token& expect(Tok t, const std::string& context) {
        if (peek().type != t)
            throw SyntaxError("expected " + std::string(describe(t)) + " in " + context +
                                  ", found " + describe(peek().type),
                              SourceLoc{line, peek().col});
        return get();
    }

    std::string expect_ident(const std::string& context) {
        return expect(Tok::Ident, context).text;
    }

    void expect_keyword(const std::string& word, const std::string& context) {
        const Token& t = expect(Tok::Ident, context);
        if (t.text != word)
            throw SyntaxError("expected '" + word + "' in " + context + ", found '" +
                                  t.text + "'",
                              SourceLoc{line, t.col});
    }

    double expect_signed_number(const std::string& context) {
        const bool neg = accept(Tok::Minus);
        const Token& t = expect(Tok::Number, context);
        return neg ? -t.number : t.number;
    }

    void expect_end(const std::string& context) {
        if (peek().type != Tok::End)
            throw SyntaxError("trailing tokens after " + context,
                              SourceLoc{line, peek().col});
    }
};

// name reference recorded during parsing, resolved once all sections are in
struct PendingRef {
    std::string name;
    SourceLoc loc;
};

struct ActionUse {
    Action action;
    SourceLoc loc;
};

struct ParserState {
    ModelDocument doc;
    std::vector<PendingRef> radius_refs;
    std::vector<PendingRef> position_refs;
    std::vector<PendingRef> motion_refs;
    std::vector<PendingRef> process_refs;
    std::vector<ActionUse> actions;
};

RadiusRef parse_radius_ref(LineParser& p, ParserState& st, const std::string& context) {
    if (p.peek().type == Tok::Number) {
        return RadiusRef{p.get().number, ""};
    }
    const Token& t = p.expect(Tok::Ident, context);
    RadiusRef ref{std::nullopt, t.text};
    st.radius_refs.push_back({t.text, SourceLoc{p.line, t.col}});
    return ref;
}

void expect_coordinate(LineParser& p, const char* axis, const std::string& context) {
    const Token& t = p.expect(Tok::Ident, context);
    if (t.text != axis)
        throw SyntaxError("expected coordinate '" + std::string(axis) + "' in " + context,
                          SourceLoc{p.line, t.col});
}

// (x^2 + y^2 + z^2) with optional primes on the coordinates
void parse_square_sum(LineParser& p, bool primed, const std::string& context) {
    const char* axes[] = {"x", "y", "z"};
    for (int k = 0; k < 3; ++k) {
        expect_coordinate(p, axes[k], context);
        if (primed) p.expect(Tok::Prime, context);
        p.expect(Tok::Caret, context);
        const Token& two = p.expect(Tok::Number, context);
        if (two.number != 2.0)
            throw SyntaxError("coordinates must be squared in " + context,
                              SourceLoc{p.line, two.col});
        if (k < 2) p.expect(Tok::Plus, context);
    }
}

PositionDecl parse_position_line(LineParser& p, ParserState& st) {
    const std::string name = p.expect_ident("position declaration");
    p.expect(Tok::Assign, "position declaration");
    if (p.peek().type == Tok::Ident && p.peek().text == "rand") {
        p.get();
        p.expect(Tok::LParen, "rand position");
        expect_coordinate(p, "x", "rand position");
        p.expect(Tok::Comma, "rand position");
        expect_coordinate(p, "y", "rand position");
        p.expect(Tok::Comma, "rand position");
        expect_coordinate(p, "z", "rand position");
        p.expect(Tok::RParen, "rand position");
        p.expect(Tok::SuchThat, "rand position");
        p.expect(Tok::LParen, "sphere constraint");
        parse_square_sum(p, false, "sphere constraint");
        p.expect(Tok::RParen, "sphere constraint");
        p.expect(Tok::Equals, "sphere constraint");
        RadiusRef r = parse_radius_ref(p, st, "sphere constraint");
        p.expect_end("position declaration");
        return PositionDecl{name, SphereRand{std::move(r)}};
    }
    FixedPosition fp{};
    const char* axes[] = {"x", "y", "z"};
    double* slots[] = {&fp.x, &fp.y, &fp.z};
    for (int k = 0; k < 3; ++k) {
        expect_coordinate(p, axes[k], "fixed position");
        p.expect(Tok::Equals, "fixed position");
        *slots[k] = p.expect_signed_number("fixed position");
        if (k < 2) p.expect(Tok::Caret, "fixed position");
    }
    p.expect_end("position declaration");
    return PositionDecl{name, fp};
}

RadiusDecl parse_radius_line(LineParser& p) {
    const std::string name = p.expect_ident("radius declaration");
    if (!p.accept(Tok::Assign)) p.expect(Tok::Equals, "radius declaration");
    const double value = p.expect_signed_number("radius declaration");
    p.expect_end("radius declaration");
    return RadiusDecl{name, value};
}

MotionDecl parse_motion_line(LineParser& p, ParserState& st) {
    MotionDecl decl;
    decl.name = p.expect_ident("motion declaration");
    p.expect(Tok::LParen, "motion declaration");
    p.expect(Tok::RParen, "motion declaration");
    p.expect(Tok::Assign, "motion declaration");
    parse_square_sum(p, true, "motion constraint");
    p.expect(Tok::Less, "motion constraint");
    decl.bound = parse_radius_ref(p, st, "motion constraint");
    if (p.accept(Tok::Comma)) {
        const char* axes[] = {"x", "y", "z"};
        std::string pos_name;
        for (int k = 0; k < 3; ++k) {
            expect_coordinate(p, axes[k], "escape clause");
            p.expect(Tok::Equals, "escape clause");
            const Token& t = p.expect(Tok::Ident, "escape clause");
            if (k == 0) {
                pos_name = t.text;
                st.position_refs.push_back({t.text, SourceLoc{p.line, t.col}});
            } else if (t.text != pos_name) {
                throw SyntaxError("escape clause must reposition to a single declaration",
                                  SourceLoc{p.line, t.col});
            }
            p.expect(Tok::LParen, "escape clause");
            expect_coordinate(p, axes[k], "escape clause");
            p.expect(Tok::RParen, "escape clause");
            if (k < 2) p.expect(Tok::Caret, "escape clause");
        }
        p.expect_keyword("otherwise", "escape clause");
        decl.escape_position = pos_name;
    }
    p.expect_end("motion declaration");
    return decl;
}

Action parse_action(LineParser& p, ParserState& st) {
    Action a;
    const Token& ch = p.expect(Tok::Ident, "channel action");
    a.channel = ch.text;
    if (p.accept(Tok::Bang))
        a.send = true;
    else {
        p.expect(Tok::Query, "channel action");
        a.send = false;
    }
    p.expect(Tok::LParen, "channel action");
    p.expect(Tok::Tilde, "channel action");
    p.expect(Tok::Comma, "channel action");
    a.radius = parse_radius_ref(p, st, "channel action");
    p.expect(Tok::RParen, "channel action");
    st.actions.push_back({a, SourceLoc{p.line, ch.col}});
    return a;
}

ProcessTerm parse_term(LineParser& p, ParserState& st);

// Atom: nil, a parenthesized term, a name restriction, or a single action
// prefix. Does not consume '+', so prefix binds tighter than sum.
ProcessTerm parse_atom(LineParser& p, ParserState& st) {
    if (p.peek().type == Tok::Number) {
        const Token& t = p.get();
        if (t.number != 0.0)
            throw SyntaxError("only the nil process '0' may terminate a term",
                              SourceLoc{p.line, t.col});
        return ProcessTerm{};  // Nil
    }
    if (p.accept(Tok::LParen)) {
        if (p.peek().type == Tok::Ident && p.peek().text == "new") {
            p.get();
            ProcessTerm t;
            t.kind = ProcessTerm::Kind::New;
            t.new_name = p.expect_ident("name restriction");
            p.expect(Tok::RParen, "name restriction");
            t.continuations.push_back(parse_atom(p, st));
            return t;
        }
        ProcessTerm inner = parse_term(p, st);
        p.expect(Tok::RParen, "parenthesized term");
        return inner;
    }
    ProcessTerm t;
    t.kind = ProcessTerm::Kind::PrefixSum;
    t.actions.push_back(parse_action(p, st));
    p.expect(Tok::Dot, "action prefix");
    t.continuations.push_back(parse_atom(p, st));
    return t;
}

ProcessTerm parse_primary(LineParser& p, ParserState& st) {
    ProcessTerm first = parse_atom(p, st);
    if (p.peek().type != Tok::Plus) return first;
    const auto require_prefix = [&](const ProcessTerm& t) {
        if (t.kind != ProcessTerm::Kind::PrefixSum || t.actions.size() != 1)
            throw SyntaxError("sum alternatives must be action prefixes",
                              SourceLoc{p.line, p.peek().col});
    };
    require_prefix(first);
    ProcessTerm sum = std::move(first);
    while (p.accept(Tok::Plus)) {
        ProcessTerm alt = parse_atom(p, st);
        require_prefix(alt);
        sum.actions.push_back(std::move(alt.actions[0]));
        sum.continuations.push_back(std::move(alt.continuations[0]));
    }
    return sum;
}

ProcessTerm parse_term(LineParser& p, ParserState& st) {
    ProcessTerm first = parse_primary(p, st);
    if (p.peek().type != Tok::Bar) return first;
    ProcessTerm par;
    par.kind = ProcessTerm::Kind::Parallel;
    par.continuations.push_back(std::move(first));
    while (p.accept(Tok::Bar)) par.continuations.push_back(parse_primary(p, st));
    return par;
}

ProcessDef parse_process_line(LineParser& p, ParserState& st) {
    ProcessDef def;
    def.name = p.expect_ident("process definition");
    if (p.accept(Tok::LBracket)) {
        const Token& m = p.expect(Tok::Ident, "motion reference");
        def.motion = m.text;
        st.motion_refs.push_back({m.text, SourceLoc{p.line, m.col}});
        p.expect(Tok::RBracket, "motion reference");
    }
    p.expect(Tok::Equals, "process definition");
    def.body = parse_term(p, st);
    p.expect_end("process definition");
    return def;
}

std::vector<std::string> parse_initial_line(LineParser& p, ParserState& st) {
    std::vector<std::string> names;
    do {
        const Token& t = p.expect(Tok::Ident, "initial process");
        names.push_back(t.text);
        st.process_refs.push_back({t.text, SourceLoc{p.line, t.col}});
    } while (p.accept(Tok::Bar));
    p.expect_end("initial process");
    return names;
}

// ------------------------------------------------------------- sections

constexpr const char* kSectionHeaders[] = {
    "Position declarations",  "Radius declarations", "Potential of mean force declarations",
    "Motion declarations",    "Process definitions", "Initial process",
};

struct Line {
    std::string text;
    int number;
};

std::vector<Line> content_lines(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        if (const size_t hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const size_t first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const size_t last = raw.find_last_not_of(" \t\r");
        lines.push_back({raw.substr(first, last - first + 1), n});
    }
    return lines;
}

void check_duplicate(std::set<std::string>& seen, const std::string& name, int line) {
    if (!seen.insert(name).second)
        throw DuplicateDeclaration("duplicate declaration of '" + name + "'",
                                   SourceLoc{line, 1});
}

void resolve_references(const ParserState& st) {
    const auto& doc = st.doc;
    const auto check = [](const std::vector<PendingRef>& refs, auto&& declared,
                          const char* what) {
        for (const auto& ref : refs)
            if (!declared(ref.name))
                throw UndeclaredName("undeclared " + std::string(what) + " '" + ref.name +
                                         "'",
                                     ref.loc);
    };
    check(st.radius_refs,
          [&](const std::string& n) {
              return std::any_of(doc.radii.begin(), doc.radii.end(),
                                 [&](const RadiusDecl& d) { return d.name == n; });
          },
          "radius");
    check(st.position_refs,
          [&](const std::string& n) {
              return std::any_of(doc.positions.begin(), doc.positions.end(),
                                 [&](const PositionDecl& d) { return d.name == n; });
          },
          "position");
    check(st.motion_refs,
          [&](const std::string& n) {
              return std::any_of(doc.motions.begin(), doc.motions.end(),
                                 [&](const MotionDecl& d) { return d.name == n; });
          },
          "motion");
    check(st.process_refs,
          [&](const std::string& n) {
              return std::any_of(doc.processes.begin(), doc.processes.end(),
                                 [&](const ProcessDef& d) { return d.name == n; });
          },
          "process");

    // Complementarity: every channel must pair sends with receives of equal radius.
    std::map<std::string, std::vector<const ActionUse*>> by_channel;
    for (const auto& use : st.actions) by_channel[use.action.channel].push_back(&use);
    for (const auto& [channel, uses] : by_channel) {
        const bool has_send = std::any_of(uses.begin(), uses.end(),
                                          [](const ActionUse* u) { return u->action.send; });
        const bool has_recv = std::any_of(uses.begin(), uses.end(),
                                          [](const ActionUse* u) { return !u->action.send; });
        if (!has_send || !has_recv)
            throw UndeclaredName("channel '" + channel + "' has no complementary " +
                                     (has_send ? "receive" : "send") + " action",
                                 uses.front()->loc);
        const double r0 = doc.resolve_radius(uses.front()->action.radius);
        for (const auto* use : uses)
            if (doc.resolve_radius(use->action.radius) != r0)
                throw UndeclaredName("channel '" + channel +
                                         "' used with mismatched action radii",
                                     use->loc);
    }
}

}  // namespace

double ModelDocument::resolve_radius(const RadiusRef& ref) const {
    if (ref.literal) return *ref.literal;
    for (const auto& d : radii)
        if (d.name == ref.name) return d.value;
    throw UndeclaredName("undeclared radius '" + ref.name + "'", SourceLoc{0, 0});
}

ModelDocument parse_model(const std::string& text) {
    const std::vector<Line> lines = content_lines(text);
    ParserState st;
    size_t i = 0;

    std::set<std::string> position_names, radius_names, motion_names, process_names;

    for (int section = 0; section < 6; ++section) {
        const char* header = kSectionHeaders[section];
        if (i >= lines.size() || lines[i].text != header) {
            const int at = i < lines.size() ? lines[i].number : static_cast<int>(lines.empty() ? 1 : lines.back().number + 1);
            throw MissingSection(std::string("missing section '") + header + "'",
                                 SourceLoc{at, 1});
        }
        ++i;
        const auto is_header = [](const std::string& s) {
            return std::any_of(std::begin(kSectionHeaders), std::end(kSectionHeaders),
                               [&](const char* h) { return s == h; });
        };
        while (i < lines.size() && !is_header(lines[i].text)) {
            if (section == 2) {
                // The expression is kept verbatim (lowering decides whether
                // it is usable), so split on := / = without lexing it.
                const std::string& full = lines[i].text;
                size_t eq = full.find(":=");
                size_t rhs = eq != std::string::npos ? eq + 2 : std::string::npos;
                if (rhs == std::string::npos) {
                    eq = full.find("≔");  // unicode colon-equals
                    if (eq != std::string::npos) rhs = eq + 3;
                }
                if (rhs == std::string::npos) {
                    eq = full.find('=');
                    if (eq == std::string::npos)
                        throw SyntaxError("expected ':=' in potential declaration",
                                          SourceLoc{lines[i].number, 1});
                    rhs = eq + 1;
                }
                const size_t name_end = full.find_last_not_of(" \t", eq - 1);
                if (name_end == std::string::npos)
                    throw SyntaxError("potential declaration needs a name",
                                      SourceLoc{lines[i].number, 1});
                st.doc.pmf_name = full.substr(0, name_end + 1);
                const size_t start = full.find_first_not_of(" \t", rhs);
                std::string expr =
                    start == std::string::npos ? std::string() : full.substr(start);
                while (!expr.empty() && (expr.back() == ' ' || expr.back() == '\t'))
                    expr.pop_back();
                if (expr.empty())
                    throw SyntaxError("potential declaration needs a right-hand side",
                                      SourceLoc{lines[i].number, 1});
                if (expr == "not defined")
                    st.doc.pmf_expr.reset();
                else
                    st.doc.pmf_expr = std::move(expr);
                ++i;
                continue;
            }
            LineParser p(lines[i].text, lines[i].number);
            switch (section) {
                case 0: {
                    PositionDecl d = parse_position_line(p, st);
                    check_duplicate(position_names, d.name, lines[i].number);
                    st.doc.positions.push_back(std::move(d));
                    break;
                }
                case 1: {
                    RadiusDecl d = parse_radius_line(p);
                    check_duplicate(radius_names, d.name, lines[i].number);
                    st.doc.radii.push_back(d);
                    break;
                }
                case 2:
                    break;  // handled above without the lexer
                case 3: {
                    MotionDecl d = parse_motion_line(p, st);
                    check_duplicate(motion_names, d.name, lines[i].number);
                    st.doc.motions.push_back(std::move(d));
                    break;
                }
                case 4: {
                    ProcessDef d = parse_process_line(p, st);
                    check_duplicate(process_names, d.name, lines[i].number);
                    st.doc.processes.push_back(std::move(d));
                    break;
                }
                case 5: {
                    if (!st.doc.initial.empty())
                        throw SyntaxError("initial process must be a single composition",
                                          SourceLoc{lines[i].number, 1});
                    st.doc.initial = parse_initial_line(p, st);
                    break;
                }
            }
            ++i;
        }
    }
    if (st.doc.initial.empty())
        throw MissingSection("initial process composition is empty",
                             SourceLoc{lines.empty() ? 1 : lines.back().number, 1});

    resolve_references(st);
    return st.doc;
}

namespace {

std::string format_radius_ref(const RadiusRef& ref) {
    return ref.literal ? format_double(*ref.literal) : ref.name;
}

std::string format_term(const ProcessTerm& t);

std::string format_child(const ProcessTerm& t) {
    const bool atomic = t.kind == ProcessTerm::Kind::Nil ||
                        (t.kind == ProcessTerm::Kind::PrefixSum && t.actions.size() == 1);
    return atomic ? format_term(t) : "(" + format_term(t) + ")";
}

std::string format_term(const ProcessTerm& t) {
    switch (t.kind) {
        case ProcessTerm::Kind::Nil: return "0";
        case ProcessTerm::Kind::New:
            return "(new " + t.new_name + ") " + format_child(t.continuations[0]);
        case ProcessTerm::Kind::Parallel: {
            std::string out;
            for (size_t k = 0; k < t.continuations.size(); ++k) {
                if (k) out += " | ";
                out += format_child(t.continuations[k]);
            }
            return out;
        }
        case ProcessTerm::Kind::PrefixSum: {
            std::string out;
            for (size_t k = 0; k < t.actions.size(); ++k) {
                if (k) out += " + ";
                const Action& a = t.actions[k];
                out += a.channel + (a.send ? "!" : "?") + "(~, " +
                       format_radius_ref(a.radius) + ")." + format_child(t.continuations[k]);
            }
            return out;
        }
    }
    return {};
}

}  // namespace

std::string format_model(const ModelDocument& doc) {
    std::string out;
    out += "Position declarations\n";
    for (const auto& d : doc.positions) {
        if (const auto* fp = std::get_if<FixedPosition>(&d.expr)) {
            out += d.name + " := x = " + format_double(fp->x) + " ^ y = " +
                   format_double(fp->y) + " ^ z = " + format_double(fp->z) + "\n";
        } else {
            const auto& sr = std::get<SphereRand>(d.expr);
            out += d.name + " := rand(x,y,z) s.t. (x^2 + y^2 + z^2) = " +
                   format_radius_ref(sr.radius) + "\n";
        }
    }
    out += "\nRadius declarations\n";
    for (const auto& d : doc.radii)
        out += d.name + " := " + format_double(d.value) + "\n";
    out += "\nPotential of mean force declarations\n";
    out += doc.pmf_name + " := " + (doc.pmf_expr ? *doc.pmf_expr : "not defined") + "\n";
    out += "\nMotion declarations\n";
    for (const auto& d : doc.motions) {
        out += d.name + "() := x'^2 + y'^2 + z'^2 < " + format_radius_ref(d.bound);
        if (!d.escape_position.empty()) {
            const std::string& e = d.escape_position;
            out += ", x = " + e + "(x) ^ y = " + e + "(y) ^ z = " + e + "(z) otherwise";
        }
        out += "\n";
    }
    out += "\nProcess definitions\n";
    for (const auto& d : doc.processes) {
        out += d.name;
        if (!d.motion.empty()) out += "[" + d.motion + "]";
        out += " = " + format_term(d.body) + "\n";
    }
    out += "\nInitial process\n";
    for (size_t k = 0; k < doc.initial.size(); ++k) {
        if (k) out += " | ";
        out += doc.initial[k];
    }
    out += "\n";
    return out;
}

LoweredModel lower_to_nam(const ModelDocument& doc, double D) {
    if (doc.pmf_expr)
        throw NotNamShaped(
            "potential of mean force '" + *doc.pmf_expr +
            "' is declared but force lowering is not supported; declare it 'not defined'");
    if (doc.processes.size() != 3)
        throw NotNamShaped("NAM shape requires exactly three processes, found " +
                           std::to_string(doc.processes.size()));
    if (doc.positions.size() != doc.processes.size())
        throw NotNamShaped("each process needs exactly one position declaration");
    if (doc.initial.size() != 3)
        throw NotNamShaped("initial process must compose the three NAM processes");
    {
        std::set<std::string> named(doc.initial.begin(), doc.initial.end());
        for (const auto& p : doc.processes)
            if (!named.count(p.name))
                throw NotNamShaped("process '" + p.name + "' missing from initial process");
    }

    // Process i is bound to position declaration i.
    int mover = -1, origin = -1;
    for (size_t k = 0; k < doc.processes.size(); ++k) {
        if (!doc.processes[k].motion.empty()) {
            if (mover >= 0) throw NotNamShaped("more than one process carries a movement function");
            mover = static_cast<int>(k);
        }
        if (const auto* fp = std::get_if<FixedPosition>(&doc.positions[k].expr)) {
            if (fp->x != 0.0 || fp->y != 0.0 || fp->z != 0.0)
                throw NotNamShaped("fixed positions other than the origin are not NAM-shaped");
            if (origin >= 0) throw NotNamShaped("more than one process sits at the origin");
            origin = static_cast<int>(k);
        }
    }
    if (mover < 0) throw NotNamShaped("no process carries a movement function");
    if (origin < 0) throw NotNamShaped("no process sits at the origin");
    if (mover == origin) throw NotNamShaped("the moving process cannot sit at the origin");

    int exit = -1;
    for (int k = 0; k < 3; ++k)
        if (k != mover && k != origin) exit = k;

    const auto* mover_sphere = std::get_if<SphereRand>(&doc.positions[mover].expr);
    const auto* exit_sphere = std::get_if<SphereRand>(&doc.positions[exit].expr);
    if (!mover_sphere)
        throw NotNamShaped("the moving process must start on a rand(...) sphere");
    if (!exit_sphere)
        throw NotNamShaped("the exit process must sit on a rand(...) sphere");

    // Each body must be a single action prefix ending in nil; the mover sends.
    std::optional<double> action_radius;
    std::string channel;
    for (int k = 0; k < 3; ++k) {
        const ProcessTerm& body = doc.processes[k].body;
        if (body.kind != ProcessTerm::Kind::PrefixSum || body.actions.size() != 1 ||
            body.continuations[0].kind != ProcessTerm::Kind::Nil)
            throw NotNamShaped("process '" + doc.processes[k].name +
                               "' must be a single action prefix ending in 0");
        const Action& a = body.actions[0];
        if (channel.empty()) channel = a.channel;
        if (a.channel != channel)
            throw NotNamShaped("all NAM processes must share one collision channel");
        if (a.send != (k == mover))
            throw NotNamShaped("only the moving process may send on the collision channel");
        const double r = doc.resolve_radius(a.radius);
        if (action_radius && *action_radius != r)
            throw NotNamShaped("collision channel used with mismatched radii");
        action_radius = r;
    }

    const double a = *action_radius;
    const double b = doc.resolve_radius(mover_sphere->radius);
    const double q = doc.resolve_radius(exit_sphere->radius);

    return LoweredModel{make_geometry(a, b, q, D), SimulatorConfig{}};
}

}  // namespace nambd::spacepi
