#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "coherency/backend.hpp"
#include "coherency/corpus.hpp"
#include "coherency/engine.hpp"
#include "coherency/prompting.hpp"
#include "coherency/synthetic.hpp"
#include "coherency/text.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("coherency-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline coherency::Relation make_relation(const std::string& id, const std::string& tmpl,
                                         coherency::RelType type = coherency::RelType::NToM,
                                         bool symmetric = false) {
  coherency::Relation r;
  r.id = id;
  r.template_text = tmpl;
  r.rel_type = type;
  r.symmetric = symmetric;
  return r;
}

// Answers from a prompt -> ranked answers table; unknown prompts get no answer.
class TableBackend : public coherency::Backend {
 public:
  std::map<std::string, std::vector<std::string>> answers;
  coherency::BackendCapabilities caps;
  bool honor_bans = true;

  coherency::BackendCapabilities capabilities() const override { return caps; }
  std::vector<coherency::Prediction> predict(const coherency::PredictRequest& req) const override {
    std::vector<coherency::Prediction> out;
    auto it = answers.find(req.prompt);
    if (it == answers.end()) return out;
    std::set<std::string> banned;
    for (const auto& b : req.banned) banned.insert(coherency::normalize_entity(b));
    double score = 0.0;
    for (const auto& a : it->second) {
      if (static_cast<int>(out.size()) >= req.n_best) break;
      if (honor_bans && banned.count(coherency::normalize_entity(a))) continue;
      out.push_back({a, score, static_cast<int>(out.size()) + 1});
      score -= 1.0;
    }
    return out;
  }
  std::vector<double> score(std::string_view, std::span<const std::string> c) const override {
    return std::vector<double>(c.size(), 0.0);
  }
  int token_count(std::string_view text) const override { return coherency::count_words(text); }
  std::string identity() const override { return "table"; }
};

inline coherency::SyntheticKBConfig mixed_config(std::uint64_t seed, coherency::BehaviorKind kind,
                                                 int scale = 1) {
  using coherency::RelType;
  coherency::SyntheticKBConfig c;
  c.seed = seed;
  c.behavior.kind = kind;
  c.relations = {
      {"R11", RelType::OneToOne, false, 20 * scale, 5, 4, 0, 0, 0},
      {"RN1", RelType::NToOne, false, 10, 5, 4 * scale, 0, 0, 0},
      {"RNM", RelType::NToM, false, 30 * scale, 5, 4, 0, 0, 0},
      {"RSYM", RelType::NToM, true, 15 * scale, 5, 4, 0, 0, 0},
  };
  return c;
}

// ---------------------------------------------------------------------------
// Loop-literal transcription of the two-round probing procedure. Written
// against the raw Backend interface with its own matching and banning so it
// shares no scoring code with the engine.

inline std::string naive_lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline std::string naive_strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool naive_contains_either(std::string a, std::string b) {
  a = naive_lower(naive_strip(a));
  b = naive_lower(naive_strip(b));
  if (!a.empty() && a.back() == '.') a = naive_strip(a.substr(0, a.size() - 1));
  if (!b.empty() && b.back() == '.') b = naive_strip(b.substr(0, b.size() - 1));
  if (a.empty() || b.empty()) return false;
  return a.find(b) != std::string::npos || b.find(a) != std::string::npos;
}

struct NaiveBits {
  bool round1 = false, round2 = false, c1 = false, c2 = false, all_correct = false;
  bool operator==(const NaiveBits&) const = default;
};

inline std::string naive_top(const coherency::Backend& backend, const std::string& prompt,
                             const std::string& marker, const std::vector<std::string>& banned) {
  coherency::PredictRequest req{prompt, marker, 10, banned};
  for (const auto& p : backend.predict(req)) {
    bool is_banned = false;
    for (const auto& b : banned)
      if (naive_lower(naive_strip(b)) == naive_lower(naive_strip(p.text))) is_banned = true;
    if (!is_banned) return p.text;
  }
  return "";
}

inline std::vector<NaiveBits> naive_algorithm1(const coherency::Backend& backend,
                                               const coherency::Corpus& corpus) {
  using coherency::Direction;
  const std::string marker = backend.capabilities().mask_marker;
  std::vector<NaiveBits> out;
  for (const auto& [rid, triples] : corpus.triples) {
    const coherency::Relation& rel = corpus.relations.at(rid);
    for (const auto& t : triples) {
      NaiveBits bits;
      const std::string S = t.subject, O = t.object;

      // round 1
      std::string O1 = naive_top(
          backend, coherency::render(rel, S, Direction::PredictObject, marker, {}).text, marker, {});
      std::vector<std::string> banned1;
      for (const auto& u : triples)
        if (naive_lower(u.object) == naive_lower(naive_strip(O1)) && naive_lower(u.subject) != naive_lower(S))
          banned1.push_back(u.subject);
      std::string S1;
      if (!O1.empty())
        S1 = naive_top(backend,
                       coherency::render(rel, coherency::clean_prediction(O1), Direction::PredictSubject,
                                         marker, {})
                           .text,
                       marker, banned1);
      bits.round1 = naive_contains_either(S1, S);

      // round 2
      std::string S2 = naive_top(
          backend, coherency::render(rel, O, Direction::PredictSubject, marker, {}).text, marker, {});
      std::vector<std::string> banned2;
      for (const auto& u : triples)
        if (naive_lower(u.subject) == naive_lower(naive_strip(S2)) && naive_lower(u.object) != naive_lower(O))
          banned2.push_back(u.object);
      std::string O2;
      if (!S2.empty())
        O2 = naive_top(backend,
                       coherency::render(rel, coherency::clean_prediction(S2), Direction::PredictObject,
                                         marker, {})
                           .text,
                       marker, banned2);
      bits.round2 = naive_contains_either(O2, O);

      bits.c1 = naive_contains_either(O1, O);
      bits.c2 = naive_contains_either(S2, S);
      bits.all_correct = bits.c1 && naive_contains_either(S1, S) && bits.c2 && naive_contains_either(O2, O);
      out.push_back(bits);
    }
  }
  return out;
}

inline NaiveBits bits_of(const coherency::InstanceResult& r) {
  return {r.round1.coherent, r.round2.coherent, r.c1, r.c2, r.all_correct};
}

}  // namespace testing
