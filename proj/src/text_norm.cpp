#include "screenkit/text_norm.hpp"

#include <algorithm>
#include <charconv>

namespace screenkit {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

bool is_article(std::string_view t) { return t == "a" || t == "an" || t == "the"; }

}  // namespace

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string_view trim_ws(std::string_view text) {
    while (!text.empty() && is_ws(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_ws(text.back())) text.remove_suffix(1);
    return text;
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> squad_tokens(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        if (is_ascii_punct(c)) continue;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        cleaned.push_back(c);
    }
    std::vector<std::string> tokens = split_ws(cleaned);
    std::erase_if(tokens, [](const std::string& t) { return is_article(t); });
    return tokens;
}

std::string squad_normalize(std::string_view text) {
    std::string out;
    for (const auto& t : squad_tokens(text)) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(a.size() + 1), cur(a.size() + 1);
    for (std::size_t i = 0; i <= a.size(); ++i) prev[i] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            const std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[a.size()];
}

std::optional<double> parse_number(std::string_view text) {
    std::string_view t = trim_ws(text);
    if (!t.empty() && t.back() == '%') {
        t.remove_suffix(1);
        t = trim_ws(t);
    }
    if (t.empty()) return std::nullopt;
    double value = 0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

// ---------------------------------------------------------------------------
// Porter stemmer (M. F. Porter, 1980), ported from the reference definition.

namespace {

class PorterState {
public:
    explicit PorterState(std::string w) : w_(std::move(w)), end_(w_.size()) {}

    std::string result() { return w_.substr(0, end_); }

    void run() {
        if (end_ <= 2) return;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
    }

private:
    std::string w_;
    std::size_t end_;   // stem length under consideration
    std::size_t j_ = 0; // end of stem when a suffix matched

    bool cons(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Measure of the stem w_[0..j_): the m in [C](VC)^m[V].
    int m() const {
        int n = 0;
        std::size_t i = 0;
        while (true) {
            if (i >= j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i >= j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i >= j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (std::size_t i = 0; i < j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_c(std::size_t i) const {
        if (i < 1) return false;
        if (w_[i] != w_[i - 1]) return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, where the final consonant is
    // not w, x, or y.
    bool cvc(std::size_t i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char c = w_[i];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) {
        if (s.size() > end_) return false;
        if (w_.compare(end_ - s.size(), s.size(), s) != 0) return false;
        j_ = end_ - s.size();
        return true;
    }

    void set_to(std::string_view s) {
        w_.replace(j_, end_ - j_, s);
        end_ = j_ + s.size();
    }

    void replace_if_m_positive(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (w_[end_ - 1] == 's') {
            if (ends("sses")) end_ -= 2;
            else if (ends("ies")) set_to("i");
            else if (end_ >= 2 && w_[end_ - 2] != 's') --end_;
        }
        if (ends("eed")) {
            if (m() > 0) --end_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            end_ = j_;
            if (ends("at")) set_to("ate");
            else if (ends("bl")) set_to("ble");
            else if (ends("iz")) set_to("ize");
            else if (double_c(end_ - 1)) {
                const char c = w_[end_ - 1];
                if (c != 'l' && c != 's' && c != 'z') --end_;
            } else {
                j_ = end_;
                if (m() == 1 && cvc(end_ - 1)) set_to_e();
            }
        }
    }

    void set_to_e() {
        w_.replace(end_, 0, "e");
        ++end_;
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) w_[end_ - 1] = 'i';
    }

    void step2() {
        if (end_ < 2) return;
        switch (w_[end_ - 2]) {
            case 'a':
                if (ends("ational")) { replace_if_m_positive("ate"); break; }
                if (ends("tional")) { replace_if_m_positive("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { replace_if_m_positive("ence"); break; }
                if (ends("anci")) { replace_if_m_positive("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { replace_if_m_positive("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { replace_if_m_positive("ble"); break; }
                if (ends("alli")) { replace_if_m_positive("al"); break; }
                if (ends("entli")) { replace_if_m_positive("ent"); break; }
                if (ends("eli")) { replace_if_m_positive("e"); break; }
                if (ends("ousli")) { replace_if_m_positive("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { replace_if_m_positive("ize"); break; }
                if (ends("ation")) { replace_if_m_positive("ate"); break; }
                if (ends("ator")) { replace_if_m_positive("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { replace_if_m_positive("al"); break; }
                if (ends("iveness")) { replace_if_m_positive("ive"); break; }
                if (ends("fulness")) { replace_if_m_positive("ful"); break; }
                if (ends("ousness")) { replace_if_m_positive("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { replace_if_m_positive("al"); break; }
                if (ends("iviti")) { replace_if_m_positive("ive"); break; }
                if (ends("biliti")) { replace_if_m_positive("ble"); break; }
                break;
            case 'g':
                if (ends("logi")) { replace_if_m_positive("log"); break; }
                break;
        }
    }

    void step3() {
        switch (w_[end_ - 1]) {
            case 'e':
                if (ends("icate")) { replace_if_m_positive("ic"); break; }
                if (ends("ative")) { replace_if_m_positive(""); break; }
                if (ends("alize")) { replace_if_m_positive("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { replace_if_m_positive("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { replace_if_m_positive("ic"); break; }
                if (ends("ful")) { replace_if_m_positive(""); break; }
                break;
            case 's':
                if (ends("ness")) { replace_if_m_positive(""); break; }
                break;
        }
    }

    void step4() {
        if (end_ < 2) return;
        bool matched = false;
        switch (w_[end_ - 2]) {
            case 'a': matched = ends("al"); break;
            case 'c': matched = ends("ance") || ends("ence"); break;
            case 'e': matched = ends("er"); break;
            case 'i': matched = ends("ic"); break;
            case 'l': matched = ends("able") || ends("ible"); break;
            case 'n': matched = ends("ant") || ends("ement") || ends("ment") || ends("ent"); break;
            case 'o':
                if (ends("ion")) matched = j_ >= 1 && (w_[j_ - 1] == 's' || w_[j_ - 1] == 't');
                else matched = ends("ou");
                break;
            case 's': matched = ends("ism"); break;
            case 't': matched = ends("ate") || ends("iti"); break;
            case 'u': matched = ends("ous"); break;
            case 'v': matched = ends("ive"); break;
            case 'z': matched = ends("ize"); break;
            default: break;
        }
        if (matched && m() > 1) end_ = j_;
    }

    void step5() {
        j_ = end_;
        if (w_[end_ - 1] == 'e') {
            j_ = end_ - 1;
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(end_ - 2))) --end_;
            j_ = end_;
        }
        if (w_[end_ - 1] == 'l' && double_c(end_ - 1)) {
            j_ = end_;
            if (m() > 1) --end_;
        }
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    for (char c : word)
        if (c < 'a' || c > 'z') return std::string(word);  // non-lowercase-ASCII: pass through
    PorterState state{std::string(word)};
    state.run();
    return state.result();
}

}  // namespace screenkit
