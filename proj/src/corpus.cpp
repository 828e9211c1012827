#include "temporank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace temporank {

namespace {

bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

// Byte length of the whitespace sequence starting at s[i]; 0 if none.
// Covers ASCII whitespace plus the common Unicode space code points
// (U+00A0, U+2000..U+200A, U+2028, U+2029, U+205F, U+3000).
std::size_t whitespace_len(std::string_view s, std::size_t i) {
    unsigned char c0 = s[i];
    if (c0 < 0x80) return is_ascii_space(c0) ? 1 : 0;
    if (c0 == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) return 2;
    if (c0 == 0xE2 && i + 2 < s.size()) {
        unsigned char c1 = s[i + 1], c2 = s[i + 2];
        if (c1 == 0x80 && ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9)) return 3;
        if (c1 == 0x81 && c2 == 0x9F) return 3;
    }
    if (c0 == 0xE3 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        static_cast<unsigned char>(s[i + 2]) == 0x80)
        return 3;
    return 0;
}

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

void finish_token(std::string& tok, std::vector<std::string>& out) {
    if (tok.empty()) return;
    for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tok.rfind("http://", 0) == 0 || tok.rfind("https://", 0) == 0) {
        tok.clear();
        return;
    }
    while (!tok.empty() && is_ascii_punct(static_cast<unsigned char>(tok.back()))) tok.pop_back();
    std::size_t start = 0;
    while (start < tok.size() && is_ascii_punct(static_cast<unsigned char>(tok[start])) &&
           tok[start] != '#' && tok[start] != '@')
        ++start;
    if (start > 0) tok.erase(0, start);
    if (!tok.empty()) out.push_back(tok);
    tok.clear();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string f;
    while (in >> f) fields.push_back(f);
    return fields;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

std::uint32_t get_u32(std::istream& in) {
    char buf[4];
    in.read(buf, 4);
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
    std::uint32_t n = get_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

}  // namespace

bool DocumentStore::upsert(Document doc) {
    auto it = index_.find(doc.doc_id);
    if (it != index_.end()) {
        docs_[it->second] = std::move(doc);
        return false;
    }
    index_.emplace(doc.doc_id, docs_.size());
    docs_.push_back(std::move(doc));
    return true;
}

const Document* DocumentStore::find(std::string_view doc_id) const {
    auto it = index_.find(std::string(doc_id));
    return it == index_.end() ? nullptr : &docs_[it->second];
}

std::int64_t DocumentStore::min_timestamp() const {
    std::int64_t m = 0;
    bool first = true;
    for (const auto& d : docs_) {
        if (first || d.timestamp < m) m = d.timestamp;
        first = false;
    }
    return m;
}

double DocumentStore::days_from_min(std::int64_t ts) const {
    return static_cast<double>(ts - min_timestamp()) / 86400.0;
}

void Qrels::set(const std::string& topic_id, const std::string& doc_id, int grade) {
    if (grade < 0 || grade > 2) throw std::invalid_argument("qrels grade outside {0,1,2}");
    judgments_[topic_id][doc_id] = grade;
}

std::optional<int> Qrels::grade(const std::string& topic_id, const std::string& doc_id) const {
    auto t = judgments_.find(topic_id);
    if (t == judgments_.end()) return std::nullopt;
    auto d = t->second.find(doc_id);
    if (d == t->second.end()) return std::nullopt;
    return d->second;
}

bool Qrels::relevant(const std::string& topic_id, const std::string& doc_id) const {
    auto g = grade(topic_id, doc_id);
    return g.has_value() && *g >= 1;
}

std::size_t Qrels::count_relevant(const std::string& topic_id) const {
    auto t = judgments_.find(topic_id);
    if (t == judgments_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [doc, g] : t->second)
        if (g >= 1) ++n;
    return n;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string tok;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t ws = whitespace_len(text, i);
        if (ws > 0) {
            finish_token(tok, out);
            i += ws;
        } else {
            tok.push_back(text[i]);
            ++i;
        }
    }
    finish_token(tok, out);
    return out;
}

namespace {

bool parse_jsonl_record(const std::string& line, Document& doc) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) return false;
    if (!j.contains("id") || !j.contains("timestamp") || !j.contains("text")) return false;
    if (j["id"].is_string())
        doc.doc_id = j["id"].get<std::string>();
    else if (j["id"].is_number_integer())
        doc.doc_id = std::to_string(j["id"].get<std::int64_t>());
    else
        return false;
    if (!j["timestamp"].is_number_integer()) return false;
    doc.timestamp = j["timestamp"].get<std::int64_t>();
    if (doc.timestamp < 0) return false;
    if (!j["text"].is_string()) return false;
    doc.text = j["text"].get<std::string>();
    if (j.contains("retweet")) {
        if (!j["retweet"].is_boolean()) return false;
        doc.is_retweet = j["retweet"].get<bool>();
    }
    return true;
}

bool parse_tsv_record(const std::string& line, Document& doc) {
    std::size_t p1 = line.find('\t');
    if (p1 == std::string::npos) return false;
    std::size_t p2 = line.find('\t', p1 + 1);
    if (p2 == std::string::npos) return false;
    doc.doc_id = line.substr(0, p1);
    if (doc.doc_id.empty()) return false;
    try {
        std::size_t used = 0;
        std::string ts = line.substr(p1 + 1, p2 - p1 - 1);
        doc.timestamp = std::stoll(ts, &used);
        if (used != ts.size() || doc.timestamp < 0) return false;
    } catch (const std::exception&) {
        return false;
    }
    doc.text = line.substr(p2 + 1);
    return true;
}

}  // namespace

DocumentStore ingest_corpus(const std::string& path, CorpusFormat format, IngestStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    DocumentStore store;
    IngestStats local;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Document doc;
        bool ok = format == CorpusFormat::jsonl ? parse_jsonl_record(line, doc)
                                                : parse_tsv_record(line, doc);
        if (!ok) {
            ++local.malformed;
            continue;
        }
        doc.tokens = tokenize(doc.text);
        if (!store.upsert(std::move(doc))) ++local.duplicates;
        ++local.parsed;
    }
    std::size_t records = local.parsed + local.malformed;
    if (records > 0 && local.malformed * 2 > records)
        throw std::runtime_error("more than 50% malformed records in " + path);
    if (stats) *stats = local;
    return store;
}

DocumentStore filter_retweets(const DocumentStore& store) {
    DocumentStore out;
    for (const auto& d : store.docs()) {
        if (d.is_retweet) continue;
        if (!d.tokens.empty() && d.tokens.front() == "rt") continue;
        out.upsert(d);
    }
    return out;
}

namespace {

std::string tag_content(const std::string& block, const std::string& tag) {
    std::string open = "<" + tag + ">";
    std::size_t b = block.find(open);
    if (b == std::string::npos) return {};
    b += open.size();
    std::size_t e = block.find('<', b);
    if (e == std::string::npos) e = block.size();
    return trim(block.substr(b, e - b));
}

std::vector<Topic> parse_topics_trec(const std::string& content) {
    std::vector<Topic> topics;
    std::size_t pos = 0;
    while (true) {
        std::size_t b = content.find("<top>", pos);
        if (b == std::string::npos) break;
        std::size_t e = content.find("</top>", b);
        if (e == std::string::npos) throw std::runtime_error("topics: unterminated <top> block");
        std::string block = content.substr(b, e - b);
        pos = e + 6;

        std::string num = tag_content(block, "num");
        if (num.rfind("Number:", 0) == 0) num = trim(num.substr(7));
        std::string title = tag_content(block, "title");
        Topic t;
        t.topic_id = num;
        t.query_tokens = tokenize(title);
        std::string qt = tag_content(block, "querytime");
        if (!qt.empty()) {
            try {
                std::size_t used = 0;
                std::int64_t v = std::stoll(qt, &used);
                if (used == qt.size()) t.query_time = v;
            } catch (const std::exception&) {
            }
        }
        if (t.topic_id.empty()) throw std::runtime_error("topics: <top> block without <num>");
        if (t.query_tokens.empty())
            throw std::runtime_error("topics: empty query for topic " + t.topic_id);
        topics.push_back(std::move(t));
    }
    return topics;
}

}  // namespace

std::vector<Topic> parse_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topics file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();

    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '<') return parse_topics_trec(content);

    std::vector<Topic> topics;
    std::istringstream lines(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("topics line " + std::to_string(lineno) + ": expected id<TAB>query");
        Topic t;
        t.topic_id = trim(line.substr(0, tab));
        t.query_tokens = tokenize(line.substr(tab + 1));
        if (t.topic_id.empty() || t.query_tokens.empty())
            throw std::runtime_error("topics line " + std::to_string(lineno) + ": empty id or query");
        topics.push_back(std::move(t));
    }
    return topics;
}

Qrels parse_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open qrels file: " + path);
    Qrels q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_ws(line);
        if (fields.size() != 4)
            throw std::runtime_error("qrels line " + std::to_string(lineno) + ": expected 4 fields");
        int grade = 0;
        try {
            std::size_t used = 0;
            grade = std::stoi(fields[3], &used);
            if (used != fields[3].size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw std::runtime_error("qrels line " + std::to_string(lineno) + ": bad grade '" + fields[3] + "'");
        }
        if (grade < 0 || grade > 2)
            throw std::runtime_error("qrels line " + std::to_string(lineno) + ": grade " +
                                     std::to_string(grade) + " outside {0,1,2}");
        q.set(fields[0], fields[2], grade);
    }
    return q;
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write qrels file: " + path);
    for (const auto& [topic, docs] : qrels.by_topic())
        for (const auto& [doc, grade] : docs) out << topic << " 0 " << doc << " " << grade << "\n";
}

void write_topics_tsv(const std::vector<Topic>& topics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write topics file: " + path);
    for (const auto& t : topics) {
        out << t.topic_id << '\t';
        for (std::size_t i = 0; i < t.query_tokens.size(); ++i) {
            if (i) out << ' ';
            out << t.query_tokens[i];
        }
        out << '\n';
    }
}

void save_store(const DocumentStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write store file: " + path);
    out.write("TRNKSTO1", 8);
    put_u32(out, static_cast<std::uint32_t>(store.size()));
    for (const auto& d : store.docs()) {
        put_str(out, d.doc_id);
        std::int64_t ts = d.timestamp;
        char buf[8];
        std::memcpy(buf, &ts, 8);
        out.write(buf, 8);
        put_str(out, d.text);
        put_u32(out, static_cast<std::uint32_t>(d.tokens.size()));
        for (const auto& t : d.tokens) put_str(out, t);
        out.put(d.is_retweet ? 1 : 0);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DocumentStore load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open store file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "TRNKSTO1", 8) != 0)
        throw std::runtime_error("not a temporank store file: " + path);
    DocumentStore store;
    std::uint32_t n = get_u32(in);
    for (std::uint32_t i = 0; i < n; ++i) {
        Document d;
        d.doc_id = get_str(in);
        char buf[8];
        in.read(buf, 8);
        std::memcpy(&d.timestamp, buf, 8);
        d.text = get_str(in);
        std::uint32_t nt = get_u32(in);
        d.tokens.resize(nt);
        for (std::uint32_t k = 0; k < nt; ++k) d.tokens[k] = get_str(in);
        d.is_retweet = in.get() == 1;
        if (!in) throw std::runtime_error("truncated store file: " + path);
        store.upsert(std::move(d));
    }
    return store;
}

bool topic_id_less(const std::string& a, const std::string& b) {
    auto as_num = [](const std::string& s, long long& v) {
        if (s.empty()) return false;
        try {
            std::size_t used = 0;
            v = std::stoll(s, &used);
            return used == s.size();
        } catch (const std::exception&) {
            return false;
        }
    };
    long long na = 0, nb = 0;
    if (as_num(a, na) && as_num(b, nb)) {
        if (na != nb) return na < nb;
        return a < b;
    }
    return a < b;
}

}  // namespace temporank
