#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cbtree/cbtree.hpp"

namespace cbtree::support {

struct CorpusEntry {
    std::string name;
    SetDescription description;
    TreeAutomaton tree;
};

inline std::vector<CorpusEntry> load_corpus() {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(CBTREE_CORPUS_DIR)) {
        if (e.path().extension() == ".set") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusEntry> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::ostringstream text;
        text << in.rdbuf();
        SetDescription d = parse_description(text.str());
        out.push_back({f.stem().string(), d, build(d)});
    }
    return out;
}

inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = load_corpus();
    return entries;
}

/// All words of length exactly n, in lexicographic order.
inline std::vector<BinaryWord> all_words(std::size_t n) {
    std::vector<BinaryWord> out;
    for (std::size_t i = 0; i < (std::size_t(1) << n); ++i) {
        BinaryWord w;
        for (std::size_t k = n; k-- > 0;) w.push_back(static_cast<int>((i >> k) & 1));
        out.push_back(w);
    }
    return out;
}

/// Eventually periodic points of a kernel: the leftmost branch below each
/// kernel_injection node, taken over choice words in breadth-first order.
inline RationalOrder kernel_points(const TreeAutomaton& kernel, std::size_t count) {
    std::vector<Rational> points;
    std::size_t len = 0;
    while (points.size() < count) {
        for (const auto& c : all_words(len)) {
            BinaryWord path = kernel_injection_path(kernel, c);
            State q = kernel.walk(path);
            // Leftmost tail: prefer 0 at every state.
            std::map<State, std::size_t> seen;
            BinaryWord tail;
            while (seen.emplace(q, tail.size()).second) {
                int b = kernel.has_child(q, 0) ? 0 : 1;
                tail.push_back(b);
                q = kernel.child(q, b);
            }
            std::size_t start = seen[q];
            Rational x = Expansion{path + tail.prefix(start), BinaryWord(tail.str().substr(start))}.value();
            if (std::find(points.begin(), points.end(), x) == points.end()) points.push_back(x);
            if (points.size() == count) break;
        }
        ++len;
    }
    return RationalOrder(
        "kernel-points", [points](std::size_t i) { return points.at(i - 1); }, points.size());
}

} // namespace cbtree::support
