#include "chimp/script.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace chimp {

std::string ParseDiagnostic::to_string() const {
    std::ostringstream os;
    os << "parse error at " << line << ":" << column << ": " << message;
    if (!excerpt.empty()) os << "\n  | " << excerpt;
    return os.str();
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Str,
    Hash,     // #
    Star,     // *
    Question, // ?
    Bang,     // !
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Assign, // =
    SeqOp,  // :>>
    IseqOp, // *>>
    ChoiceOp, // <+>
    AndOp,  // /\ .
    OrOp,   // \/
    ImplOp, // =>
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long long int_value = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { scan_all(); }

    const std::vector<Token>& tokens() const { return tokens_; }
    std::string source_line(int line) const {
        std::istringstream is(src_);
        std::string l;
        for (int i = 0; i < line && std::getline(is, l); ++i) {
        }
        return l;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(
            ParseDiagnostic{line_, col_, msg, current_line_text()});
    }

    std::string current_line_text() const {
        std::size_t start = pos_;
        while (start > 0 && src_[start - 1] != '\n') --start;
        std::size_t end = pos_;
        while (end < src_.size() && src_[end] != '\n') ++end;
        return src_.substr(start, end - start);
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (peek() == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void push(Tok kind, std::string text, int line, int col,
              long long value = 0) {
        tokens_.push_back(Token{kind, std::move(text), value, line, col});
    }

    void scan_all() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
                continue;
            }
            const int line = line_, col = col_;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word;
                while (std::isalnum(static_cast<unsigned char>(peek())) ||
                       peek() == '_') {
                    word += peek();
                    advance();
                }
                push(Tok::Ident, std::move(word), line, col);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                std::string num;
                if (c == '-') {
                    num += '-';
                    advance();
                }
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    num += peek();
                    advance();
                }
                push(Tok::Int, num, line, col, std::stoll(num));
                continue;
            }
            if (c == '"') {
                advance();
                std::string s;
                for (;;) {
                    if (pos_ >= src_.size() || peek() == '\n')
                        fail("unterminated string literal");
                    char d = peek();
                    if (d == '"') {
                        advance();
                        break;
                    }
                    if (d == '\\') {
                        advance();
                        switch (peek()) {
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        case 'r': s += '\r'; break;
                        case '"': s += '"'; break;
                        case '\\': s += '\\'; break;
                        default: fail("unknown escape sequence");
                        }
                        advance();
                        continue;
                    }
                    s += d;
                    advance();
                }
                push(Tok::Str, std::move(s), line, col);
                continue;
            }
            // multi-character operators first
            if (c == ':' && peek(1) == '>' && peek(2) == '>') {
                advance(); advance(); advance();
                push(Tok::SeqOp, ":>>", line, col);
                continue;
            }
            if (c == '*' && peek(1) == '>' && peek(2) == '>') {
                advance(); advance(); advance();
                push(Tok::IseqOp, "*>>", line, col);
                continue;
            }
            if (c == '<' && peek(1) == '+' && peek(2) == '>') {
                advance(); advance(); advance();
                push(Tok::ChoiceOp, "<+>", line, col);
                continue;
            }
            if (c == '/' && peek(1) == '\\') {
                advance(); advance();
                push(Tok::AndOp, "/\\", line, col);
                continue;
            }
            if (c == '\\' && peek(1) == '/') {
                advance(); advance();
                push(Tok::OrOp, "\\/", line, col);
                continue;
            }
            if (c == '=' && peek(1) == '>') {
                advance(); advance();
                push(Tok::ImplOp, "=>", line, col);
                continue;
            }
            switch (c) {
            case '#': push(Tok::Hash, "#", line, col); break;
            case '*': push(Tok::Star, "*", line, col); break;
            case '?': push(Tok::Question, "?", line, col); break;
            case '!': push(Tok::Bang, "!", line, col); break;
            case '(': push(Tok::LParen, "(", line, col); break;
            case ')': push(Tok::RParen, ")", line, col); break;
            case '{': push(Tok::LBrace, "{", line, col); break;
            case '}': push(Tok::RBrace, "}", line, col); break;
            case '[': push(Tok::LBracket, "[", line, col); break;
            case ']': push(Tok::RBracket, "]", line, col); break;
            case ',': push(Tok::Comma, ",", line, col); break;
            case '=': push(Tok::Assign, "=", line, col); break;
            default:
                fail(std::string("unexpected character '") + c + "'");
            }
            advance();
        }
        push(Tok::End, "", line_, col_);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::vector<Token> tokens_;
};

const std::array<const char*, 5> kDeviceNames = {
    "ClickBack", "ClickHome", "ClickMenu", "Settings", "Rotate"};

bool is_reserved_word(const std::string& w) {
    static const std::array<const char*, 29> kReserved = {
        "Click",  "LongClick", "Type",     "Swipe",     "Pinch",
        "Sleep",  "Skip",      "ClickBack", "ClickHome", "ClickMenu",
        "Settings", "Rotate",  "assert",   "then",      "repeat",
        "optional", "monkey",  "relevantMonkey", "gorilla", "unit",
        "preserves", "val",    "check",    "with",      "choose",
        "oneOf",  "alphaStr",  "rect",     "samples"};
    return std::find_if(kReserved.begin(), kReserved.end(), [&](const char* r) {
               return w == r;
           }) != kReserved.end();
}

std::optional<DeviceEvent> device_by_name(const std::string& w) {
    for (std::size_t i = 0; i < kDeviceNames.size(); ++i)
        if (w == kDeviceNames[i]) return static_cast<DeviceEvent>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(const std::string& source, const NameTable* names)
        : lexer_(source), names_(names) {}

    Script parse_script() {
        Script script;
        std::optional<std::string> check_name;
        while (!at(Tok::End)) {
            if (at_word("val")) {
                next();
                const Token name = expect(Tok::Ident, "binding name");
                if (is_reserved_word(name.text))
                    fail_at(name, "'" + name.text + "' is a reserved word");
                if (env_.count(name.text))
                    fail_at(name, "duplicate binding '" + name.text + "'");
                expect(Tok::Assign, "'='");
                GenPtr g = parse_gen();
                env_.emplace(name.text, g);
                script.bindings.emplace_back(name.text, std::move(g));
            } else if (at_word("check")) {
                const Token kw = cur();
                next();
                if (check_name)
                    fail_at(kw, "a script may contain only one check stanza");
                const Token name = expect(Tok::Ident, "generator name");
                auto it = env_.find(name.text);
                if (it == env_.end())
                    fail_at(name, "unbound generator '" + name.text + "'");
                check_name = name.text;
                script.check_gen = it->second;
                while (true) {
                    if (at_word("with")) {
                        next();
                        script.property = parse_prop();
                    } else if (at_word("samples")) {
                        next();
                        script.options.samples = static_cast<int>(
                            expect(Tok::Int, "sample count").int_value);
                    } else if (at_word("seed")) {
                        next();
                        script.options.seed = static_cast<std::uint64_t>(
                            expect(Tok::Int, "seed").int_value);
                    } else if (at_word("reset")) {
                        next();
                        const Token mode = expect(Tok::Ident, "'keep' or 'reinstall'");
                        if (mode.text == "keep")
                            script.options.keep_state = true;
                        else if (mode.text == "reinstall")
                            script.options.keep_state = false;
                        else
                            fail_at(mode, "expected 'keep' or 'reinstall'");
                    } else {
                        break;
                    }
                }
            } else {
                fail_here("expected 'val' or 'check'");
            }
        }
        if (!check_name) fail_here("script has no check stanza");
        script.check_name = *check_name;
        return script;
    }

    GenPtr parse_gen_only() {
        GenPtr g = parse_gen();
        expect(Tok::End, "end of input");
        return g;
    }

    PropPtr parse_prop_only() {
        PropPtr p = parse_prop();
        expect(Tok::End, "end of input");
        return p;
    }

private:
    // --- token plumbing ---
    const Token& cur() const { return lexer_.tokens()[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_word(const char* w) const {
        return cur().kind == Tok::Ident && cur().text == w;
    }
    void next() { ++pos_; }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
        throw ParseError(
            ParseDiagnostic{t.line, t.col, msg, lexer_.source_line(t.line)});
    }
    [[noreturn]] void fail_here(const std::string& msg) const { fail_at(cur(), msg); }

    Token expect(Tok k, const std::string& what) {
        if (!at(k))
            fail_here("expected " + what + ", found '" +
                      (cur().kind == Tok::End ? "<end>" : cur().text) + "'");
        Token t = cur();
        next();
        return t;
    }

    // --- generators, loosest binding first ---

    GenPtr parse_gen() { return parse_then_level(); }

    GenPtr parse_then_level() {
        // Attempt "P then G" with backtracking; a failed property parse (or a
        // property not followed by 'then') means the expression starts with a
        // generator. Errors in the 'then' body itself still propagate.
        std::optional<PropPtr> guard;
        if (at(Tok::Ident) || at(Tok::LParen) || at(Tok::Bang)) {
            const std::size_t saved = pos_;
            try {
                PropPtr p = parse_prop();
                if (at_word("then")) {
                    next();
                    guard = std::move(p);
                } else {
                    pos_ = saved;
                }
            } catch (const ParseError&) {
                pos_ = saved;
            }
        }
        if (guard) return Gen::guarded(std::move(*guard), parse_then_level());
        return parse_preserves_level();
    }

    GenPtr parse_preserves_level() {
        GenPtr g = parse_choice_level();
        while (at_word("preserves")) {
            next();
            g = preserves(std::move(g), parse_prop());
        }
        return g;
    }

    GenPtr parse_choice_level() {
        GenPtr g = parse_iseq_level();
        if (at(Tok::ChoiceOp)) {
            next();
            return Gen::choice(std::move(g), parse_choice_level());
        }
        return g;
    }

    GenPtr parse_iseq_level() {
        GenPtr g = parse_seq_level();
        if (at(Tok::IseqOp)) {
            next();
            int m = 3;
            if (at(Tok::LBracket)) {
                next();
                const Token bound = expect(Tok::Int, "interrupt bound");
                if (bound.int_value < 1)
                    fail_at(bound, "interrupt bound must be >= 1");
                m = static_cast<int>(bound.int_value);
                expect(Tok::RBracket, "']'");
            }
            return interruptible_seq(std::move(g), parse_iseq_level(), m);
        }
        return g;
    }

    GenPtr parse_seq_level() {
        GenPtr g = parse_postfix_level();
        if (at(Tok::SeqOp)) {
            next();
            return Gen::seq(std::move(g), parse_seq_level());
        }
        return g;
    }

    GenPtr parse_postfix_level() {
        GenPtr g = parse_primary();
        while (at(Tok::Question)) {
            next();
            g = Gen::attempt(std::move(g));
        }
        return g;
    }

    GenPtr parse_primary() {
        if (at(Tok::LBrace)) {
            next();
            GenPtr g = parse_gen();
            expect(Tok::RBrace, "'}'");
            return g;
        }
        if (!at(Tok::Ident)) fail_here("expected a generator");
        const Token t = cur();
        const std::string& w = t.text;

        if (auto d = device_by_name(w)) {
            next();
            return Gen::device(*d);
        }
        if (w == "Skip") {
            next();
            return Gen::skip();
        }
        if (w == "unit") {
            next();
            return Gen::unit();
        }
        if (w == "Click" || w == "LongClick") {
            next();
            expect(Tok::LParen, "'('");
            IdGen id = parse_id_gen();
            expect(Tok::RParen, "')'");
            return w == "Click" ? Gen::click(std::move(id))
                                : Gen::long_click(std::move(id));
        }
        if (w == "Type") {
            next();
            expect(Tok::LParen, "'('");
            IdGen id = parse_id_gen();
            expect(Tok::Comma, "','");
            StrGen s = parse_str_gen();
            expect(Tok::RParen, "')'");
            return Gen::type_text(std::move(id), std::move(s));
        }
        if (w == "Swipe") {
            next();
            expect(Tok::LParen, "'('");
            IdGen id = parse_id_gen();
            expect(Tok::Comma, "','");
            XyGen d = parse_xy_gen(/*allow_negative=*/true);
            expect(Tok::RParen, "')'");
            return Gen::swipe(std::move(id), std::move(d));
        }
        if (w == "Pinch") {
            next();
            expect(Tok::LParen, "'('");
            XyGen a = parse_xy_gen(false);
            expect(Tok::Comma, "','");
            XyGen b = parse_xy_gen(false);
            expect(Tok::RParen, "')'");
            return Gen::pinch(std::move(a), std::move(b));
        }
        if (w == "Sleep") {
            next();
            expect(Tok::LParen, "'('");
            IntGen ms = parse_int_gen(/*min_value=*/0, "sleep duration");
            expect(Tok::RParen, "')'");
            return Gen::sleep(std::move(ms));
        }
        if (w == "assert") {
            next();
            return Gen::assertion(parse_prop());
        }
        if (w == "repeat") {
            next();
            const Token bound = expect(Tok::Int, "repeat bound");
            if (bound.int_value < 1) fail_at(bound, "repeat bound must be >= 1");
            expect(Tok::LBrace, "'{'");
            GenPtr body = parse_gen();
            expect(Tok::RBrace, "'}'");
            return Gen::repeat(static_cast<int>(bound.int_value),
                               std::move(body));
        }
        if (w == "optional") {
            next();
            expect(Tok::LBrace, "'{'");
            GenPtr body = parse_gen();
            expect(Tok::RBrace, "'}'");
            return optional_gen(std::move(body));
        }
        if (w == "monkey" || w == "relevantMonkey") {
            next();
            const Token n = expect(Tok::Int, "event count");
            if (n.int_value < 1) fail_at(n, "event count must be >= 1");
            const int count = static_cast<int>(n.int_value);
            return w == "monkey" ? monkey(count) : relevant_monkey(count);
        }
        if (w == "gorilla") {
            next();
            const Token n = expect(Tok::Int, "event count");
            if (n.int_value < 1) fail_at(n, "event count must be >= 1");
            expect(Tok::LBrace, "'{'");
            GenPtr inject = parse_gen();
            expect(Tok::RBrace, "'}'");
            return gorilla(static_cast<int>(n.int_value), std::move(inject));
        }
        if (is_reserved_word(w)) fail_here("unexpected '" + w + "'");

        // binding reference
        auto it = env_.find(w);
        if (it == env_.end()) fail_at(t, "unbound generator '" + w + "'");
        next();
        return it->second;
    }

    // --- argument generators ---

    int resolve_name(const Token& t) {
        if (!names_)
            fail_at(t, "#" + t.text + " used but no app model provides names");
        auto it = names_->find(t.text);
        if (it == names_->end())
            fail_at(t, "unknown widget name '#" + t.text + "'");
        return it->second;
    }

    UiId parse_ui_id() {
        if (at(Tok::Hash)) {
            next();
            const Token name = expect(Tok::Ident, "widget name after '#'");
            return num_id(resolve_name(name));
        }
        if (at(Tok::Int)) {
            const Token t = cur();
            next();
            return num_id(static_cast<int>(t.int_value));
        }
        if (at(Tok::Str)) {
            const Token t = cur();
            next();
            return text_id(t.text);
        }
        if (at(Tok::LParen)) {
            const Token open = cur();
            next();
            const Token x = expect(Tok::Int, "x coordinate");
            expect(Tok::Comma, "','");
            const Token y = expect(Tok::Int, "y coordinate");
            expect(Tok::RParen, "')'");
            if (x.int_value < 0 || y.int_value < 0)
                fail_at(open, "coordinate identifiers must be non-negative");
            return xy_id(static_cast<int>(x.int_value),
                         static_cast<int>(y.int_value));
        }
        fail_here("expected a widget id (#name, number, \"text\" or (x,y))");
    }

    IdGen parse_id_gen() {
        if (at(Tok::Star)) {
            next();
            return IdWildcard{};
        }
        if (at_word("oneOf")) {
            next();
            expect(Tok::LParen, "'('");
            std::vector<UiId> ids;
            ids.push_back(parse_ui_id());
            while (at(Tok::Comma)) {
                next();
                ids.push_back(parse_ui_id());
            }
            expect(Tok::RParen, "')'");
            return IdOneOf{std::move(ids)};
        }
        if (at_word("rect")) return IdFromXy{parse_rect()};
        return IdConcrete{parse_ui_id()};
    }

    XyRect parse_rect() {
        next(); // 'rect'
        const Token open = expect(Tok::LParen, "'('");
        const Token a = expect(Tok::Int, "x lower bound");
        expect(Tok::Comma, "','");
        const Token b = expect(Tok::Int, "x upper bound");
        expect(Tok::Comma, "','");
        const Token c = expect(Tok::Int, "y lower bound");
        expect(Tok::Comma, "','");
        const Token d = expect(Tok::Int, "y upper bound");
        expect(Tok::RParen, "')'");
        if (a.int_value > b.int_value || c.int_value > d.int_value)
            fail_at(open, "rect bounds must satisfy lo <= hi");
        return XyRect{static_cast<int>(a.int_value), static_cast<int>(b.int_value),
                      static_cast<int>(c.int_value), static_cast<int>(d.int_value)};
    }

    XyGen parse_xy_gen(bool allow_negative) {
        if (at_word("rect")) return parse_rect();
        const Token open = expect(Tok::LParen, "'('");
        const Token x = expect(Tok::Int, "x value");
        expect(Tok::Comma, "','");
        const Token y = expect(Tok::Int, "y value");
        expect(Tok::RParen, "')'");
        if (!allow_negative && (x.int_value < 0 || y.int_value < 0))
            fail_at(open, "coordinates must be non-negative");
        return XyConst{XyPair{static_cast<int>(x.int_value),
                              static_cast<int>(y.int_value)}};
    }

    IntGen parse_int_gen(long long min_value, const char* what) {
        if (at_word("choose")) {
            next();
            const Token open = expect(Tok::LParen, "'('");
            const Token lo = expect(Tok::Int, "lower bound");
            expect(Tok::Comma, "','");
            const Token hi = expect(Tok::Int, "upper bound");
            expect(Tok::RParen, "')'");
            if (lo.int_value > hi.int_value)
                fail_at(open, "choose bounds must satisfy lo <= hi");
            if (lo.int_value < min_value)
                fail_at(open, std::string(what) + " must be >= " +
                                  std::to_string(min_value));
            return IntChoose{lo.int_value, hi.int_value};
        }
        if (at_word("oneOf")) {
            next();
            expect(Tok::LParen, "'('");
            std::vector<long long> values;
            for (;;) {
                const Token v = expect(Tok::Int, "integer");
                if (v.int_value < min_value)
                    fail_at(v, std::string(what) + " must be >= " +
                                   std::to_string(min_value));
                values.push_back(v.int_value);
                if (!at(Tok::Comma)) break;
                next();
            }
            expect(Tok::RParen, "')'");
            return IntOneOf{std::move(values)};
        }
        const Token v = expect(Tok::Int, "integer");
        if (v.int_value < min_value)
            fail_at(v, std::string(what) + " must be >= " +
                           std::to_string(min_value));
        return IntConst{v.int_value};
    }

    StrGen parse_str_gen() {
        if (at_word("oneOf")) {
            next();
            expect(Tok::LParen, "'('");
            std::vector<std::string> values;
            values.push_back(expect(Tok::Str, "string").text);
            while (at(Tok::Comma)) {
                next();
                values.push_back(expect(Tok::Str, "string").text);
            }
            expect(Tok::RParen, "')'");
            return StrOneOf{std::move(values)};
        }
        if (at_word("alphaStr")) {
            next();
            expect(Tok::LParen, "'('");
            const Token len = expect(Tok::Int, "max length");
            if (len.int_value < 0) fail_at(len, "max length must be >= 0");
            expect(Tok::RParen, "')'");
            return AlphaStr{static_cast<int>(len.int_value)};
        }
        return StrConst{expect(Tok::Str, "string").text};
    }

    // --- properties, loosest binding first: => , \/ , /\ , ! ---

    PropPtr parse_prop() { return parse_prop_impl(); }

    PropPtr parse_prop_impl() {
        PropPtr lhs = parse_prop_or();
        if (at(Tok::ImplOp)) {
            next();
            return Prop::implies(std::move(lhs), parse_prop_impl());
        }
        return lhs;
    }

    PropPtr parse_prop_or() {
        PropPtr lhs = parse_prop_and();
        if (at(Tok::OrOp)) {
            next();
            return Prop::disj(std::move(lhs), parse_prop_or());
        }
        return lhs;
    }

    PropPtr parse_prop_and() {
        PropPtr lhs = parse_prop_not();
        if (at(Tok::AndOp)) {
            next();
            return Prop::conj(std::move(lhs), parse_prop_and());
        }
        return lhs;
    }

    PropPtr parse_prop_not() {
        if (at(Tok::Bang)) {
            next();
            return Prop::negate(parse_prop_not());
        }
        return parse_prop_atom();
    }

    PropPtr parse_prop_atom() {
        if (at(Tok::LParen)) {
            next();
            PropPtr p = parse_prop();
            expect(Tok::RParen, "')'");
            return p;
        }
        const Token name = expect(Tok::Ident, "predicate name");
        if (is_reserved_word(name.text))
            fail_at(name, "'" + name.text + "' cannot be used as a predicate");
        std::vector<PredArg> args;
        if (at(Tok::LParen)) {
            next();
            for (;;) {
                if (at(Tok::Int)) {
                    args.emplace_back(static_cast<std::int64_t>(cur().int_value));
                    next();
                } else if (at(Tok::Str)) {
                    args.emplace_back(cur().text);
                    next();
                } else if (at(Tok::Hash)) {
                    next();
                    const Token w = expect(Tok::Ident, "widget name after '#'");
                    args.emplace_back(
                        static_cast<std::int64_t>(resolve_name(w)));
                } else {
                    fail_here("expected a predicate argument");
                }
                if (!at(Tok::Comma)) break;
                next();
            }
            expect(Tok::RParen, "')'");
        }
        return Prop::pred(name.text, std::move(args));
    }

    Lexer lexer_;
    const NameTable* names_;
    std::size_t pos_ = 0;
    std::map<std::string, GenPtr> env_;
};

} // namespace

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

Script parse_script(const std::string& source, const NameTable* names) {
    return Parser(source, names).parse_script();
}

GenPtr parse_gen_text(const std::string& source, const NameTable* names) {
    return Parser(source, names).parse_gen_only();
}

PropPtr parse_prop_text(const std::string& source, const NameTable* names) {
    return Parser(source, names).parse_prop_only();
}

TracePtr parse_trace_text(const std::string& source, const NameTable* names) {
    GenPtr g = parse_gen_text(source, names);
    std::optional<TracePtr> t = gen_to_trace(*g);
    if (!t)
        throw ParseError(ParseDiagnostic{
            1, 1, "expression is a generator, not a single trace", source});
    return *t;
}

// ---------------------------------------------------------------------------
// Generator-to-trace reification
// ---------------------------------------------------------------------------

std::optional<TracePtr> gen_to_trace(const Gen& g) {
    return std::visit(
        [&](const auto& n) -> std::optional<TracePtr> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Gen::EvClick> ||
                          std::is_same_v<T, Gen::EvLongClick>) {
                IdSpec spec;
                if (const auto* c = std::get_if<IdConcrete>(&n.id))
                    spec = IdSpec::of(c->id);
                else if (std::holds_alternative<IdWildcard>(n.id))
                    spec = IdSpec::wildcard();
                else
                    return std::nullopt;
                if constexpr (std::is_same_v<T, Gen::EvClick>)
                    return Trace::event(AppEvent{ClickEvent{std::move(spec)}});
                else
                    return Trace::event(
                        AppEvent{LongClickEvent{std::move(spec)}});
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                const auto* s = std::get_if<StrConst>(&n.text);
                if (!s) return std::nullopt;
                if (const auto* c = std::get_if<IdConcrete>(&n.id))
                    return Trace::event(
                        AppEvent{TypeEvent{IdSpec::of(c->id), s->value}});
                if (std::holds_alternative<IdWildcard>(n.id))
                    return Trace::event(
                        AppEvent{TypeEvent{IdSpec::wildcard(), s->value}});
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                const auto* d = std::get_if<XyConst>(&n.delta);
                if (!d) return std::nullopt;
                if (const auto* c = std::get_if<IdConcrete>(&n.id))
                    return Trace::event(
                        AppEvent{SwipeEvent{IdSpec::of(c->id), d->value}});
                if (std::holds_alternative<IdWildcard>(n.id))
                    return Trace::event(
                        AppEvent{SwipeEvent{IdSpec::wildcard(), d->value}});
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                const auto* a = std::get_if<XyConst>(&n.from);
                const auto* b = std::get_if<XyConst>(&n.to);
                if (!a || !b) return std::nullopt;
                return Trace::event(AppEvent{PinchEvent{a->value, b->value}});
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                const auto* v = std::get_if<IntConst>(&n.millis);
                if (!v) return std::nullopt;
                return Trace::event(
                    AppEvent{SleepEvent{static_cast<int>(v->value)}});
            } else if constexpr (std::is_same_v<T, Gen::SkipG>) {
                return Trace::event(AppEvent{SkipEvent{}});
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                return Trace::event(n.event);
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                auto a = gen_to_trace(*n.first);
                if (!a) return std::nullopt;
                auto b = gen_to_trace(*n.second);
                if (!b) return std::nullopt;
                return Trace::seq(std::move(*a), std::move(*b));
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                auto b = gen_to_trace(*n.body);
                if (!b) return std::nullopt;
                return Trace::attempt(std::move(*b));
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                auto b = gen_to_trace(*n.body);
                if (!b) return std::nullopt;
                return Trace::guarded(n.guard, std::move(*b));
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                return Trace::assertion(n.prop);
            } else if constexpr (std::is_same_v<T, Gen::UnitG>) {
                return Trace::unit();
            } else {
                return std::nullopt; // ChoiceG, RepeatG
            }
        },
        g.node);
}

// ---------------------------------------------------------------------------
// Generator rendering
// ---------------------------------------------------------------------------

namespace {

// Generator precedence, loosest to tightest: then, preserves (not rendered),
// <+>, :>> , postfix ?, atom.
enum GenLevel { kGThen = 0, kGChoice, kGSeq, kGPostfix, kGAtom };

std::string render_int_gen(const IntGen& g) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, IntChoose>) {
                return "choose(" + std::to_string(n.lo) + "," +
                       std::to_string(n.hi) + ")";
            } else {
                std::string out = "oneOf(";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i) out += ",";
                    out += std::to_string(n.values[i]);
                }
                return out + ")";
            }
        },
        g);
}

std::string render_str_gen(const StrGen& g) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, StrConst>) {
                return quote_string(n.value);
            } else if constexpr (std::is_same_v<T, StrOneOf>) {
                std::string out = "oneOf(";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i) out += ",";
                    out += quote_string(n.values[i]);
                }
                return out + ")";
            } else {
                return "alphaStr(" + std::to_string(n.max_len) + ")";
            }
        },
        g);
}

std::string render_xy_gen(const XyGen& g) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, XyConst>) {
                return "(" + std::to_string(n.value.x) + "," +
                       std::to_string(n.value.y) + ")";
            } else {
                return "rect(" + std::to_string(n.x_lo) + "," +
                       std::to_string(n.x_hi) + "," + std::to_string(n.y_lo) +
                       "," + std::to_string(n.y_hi) + ")";
            }
        },
        g);
}

std::string render_id_gen(const IdGen& g) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IdConcrete>) {
                return render(n.id);
            } else if constexpr (std::is_same_v<T, IdWildcard>) {
                return "*";
            } else if constexpr (std::is_same_v<T, IdOneOf>) {
                std::string out = "oneOf(";
                for (std::size_t i = 0; i < n.ids.size(); ++i) {
                    if (i) out += ",";
                    out += render(n.ids[i]);
                }
                return out + ")";
            } else {
                if (const auto* c = std::get_if<XyConst>(&n.xy))
                    return "rect(" + std::to_string(c->value.x) + "," +
                           std::to_string(c->value.x) + "," +
                           std::to_string(c->value.y) + "," +
                           std::to_string(c->value.y) + ")";
                return render_xy_gen(n.xy);
            }
        },
        g);
}

std::string render_gen_at(const Gen& g, int min_level);

std::string brace_gen(int natural, int min_level, const std::string& text) {
    if (natural < min_level) return "{ " + text + " }";
    return text;
}

std::string render_gen_at(const Gen& g, int min_level) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Gen::EvClick>) {
                return "Click(" + render_id_gen(n.id) + ")";
            } else if constexpr (std::is_same_v<T, Gen::EvLongClick>) {
                return "LongClick(" + render_id_gen(n.id) + ")";
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                return "Type(" + render_id_gen(n.id) + "," +
                       render_str_gen(n.text) + ")";
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                return "Swipe(" + render_id_gen(n.id) + "," +
                       render_xy_gen(n.delta) + ")";
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                return "Pinch(" + render_xy_gen(n.from) + "," +
                       render_xy_gen(n.to) + ")";
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                return "Sleep(" + render_int_gen(n.millis) + ")";
            } else if constexpr (std::is_same_v<T, Gen::SkipG>) {
                return "Skip";
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                return render(UiEvent{n.event});
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                return brace_gen(kGAtom, min_level, "assert " + render(*n.prop));
            } else if constexpr (std::is_same_v<T, Gen::UnitG>) {
                return "unit";
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                return brace_gen(kGSeq, min_level,
                                 render_gen_at(*n.first, kGPostfix) + " :>> " +
                                     render_gen_at(*n.second, kGSeq));
            } else if constexpr (std::is_same_v<T, Gen::ChoiceG>) {
                return brace_gen(kGChoice, min_level,
                                 render_gen_at(*n.left, kGChoice + 1) + " <+> " +
                                     render_gen_at(*n.right, kGChoice));
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                return brace_gen(kGPostfix, min_level,
                                 render_gen_at(*n.body, kGPostfix) + " ?");
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                return brace_gen(kGThen, min_level,
                                 render(*n.guard) + " then " +
                                     render_gen_at(*n.body, kGThen));
            } else { // RepeatG
                return "repeat " + std::to_string(n.bound) + " { " +
                       render_gen_at(*n.body, 0) + " }";
            }
        },
        g.node);
}

} // namespace

std::string render_gen(const Gen& g) { return render_gen_at(g, 0); }

} // namespace chimp
