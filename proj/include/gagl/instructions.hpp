// Copyright (c) 2026 The gagl authors
// SPDX-License-Identifier: Apache-2.0
//
// Instruction grammar: "Go to the X" phrases over size/color/superlative
// attributes and five object classes, the canonical 70-instruction corpus,
// the train/test split used for zero-shot evaluation, and the vocabulary.

#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <string_view>

#include "gagl/common.hpp"

namespace gagl {

enum class Color : std::uint8_t { None = 0, Red, Green, Blue, Yellow };
enum class SizeAttr : std::uint8_t { None = 0, Short, Tall };
enum class Superlative : std::uint8_t { None = 0, Largest, Smallest };
enum class ObjectClass : std::uint8_t { Any = 0, Pillar, Torch, Armor, Keycard, Skullkey };

struct Instruction {
    std::string text;
    Superlative superlative = Superlative::None;
    SizeAttr size = SizeAttr::None;
    Color color = Color::None;
    ObjectClass object_class = ObjectClass::Any;
};

namespace detail {

// Appendix order: size+color, color+size, color, object type, superlative
// rows. "tall object" appears twice in the source table; the duplicate in
// the size row is dropped, leaving 70 unique instructions.
inline constexpr std::array<std::string_view, 70> kCorpusPhrases = {
    // size + color
    "tall green torch", "short red object", "short red pillar", "short red torch", "tall red object",
    "tall blue object", "tall green object", "tall red pillar", "tall green pillar", "short blue torch",
    "tall red torch", "short green torch", "short green object", "short blue object", "tall blue torch",
    "short green pillar",
    // color + size
    "red short object", "green tall torch", "red short pillar", "red short torch", "red tall object",
    "green tall object", "blue tall object", "red tall pillar", "green tall pillar", "red tall torch",
    "blue tall torch", "green short object", "green short torch", "blue short object", "green short pillar",
    "blue short torch",
    // color
    "blue torch", "red torch", "green torch", "yellow object", "green armor", "tall object", "red skullkey",
    "red object", "green object", "blue object", "red pillar", "green pillar", "red keycard", "red armor",
    "blue skullkey", "blue keycard", "yellow keycard", "yellow skullkey",
    // object type
    "torch", "keycard", "skullkey", "pillar", "armor",
    // superlative size + color
    "smallest yellow object", "smallest blue object", "smallest green object", "largest blue object",
    "largest red object", "largest green object", "largest yellow object", "smallest red object",
    // superlative size
    "largest object", "smallest object",
    // size
    "short torch", "tall torch", "tall pillar", "short pillar", "short object",
};

// Held-out attribute-object combinations for zero-shot evaluation. Ordered
// sized pairs stay together so no held-out combination leaks into training
// under the other attribute order.
inline constexpr std::array<std::string_view, 15> kTestPhrases = {
    "short red torch", "red short torch", "tall blue object", "blue tall object", "short green pillar",
    "green short pillar", "blue torch", "red skullkey", "yellow keycard", "green armor",
    "largest yellow object", "smallest blue object", "tall pillar", "short object", "red keycard",
};

// Small training subset for desk-scale (CI speed) runs.
inline constexpr std::array<std::string_view, 10> kDeskPhrases = {
    "torch", "pillar", "armor", "keycard", "skullkey",
    "red object", "green object", "blue object", "yellow object", "red pillar",
};

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::istringstream in{std::string(s)};
    std::string w;
    while (in >> w) words.push_back(lower(w));
    return words;
}

}  // namespace detail

inline const char* color_name(Color c) {
    switch (c) {
        case Color::Red: return "red";
        case Color::Green: return "green";
        case Color::Blue: return "blue";
        case Color::Yellow: return "yellow";
        default: return "";
    }
}

inline const char* class_name(ObjectClass c) {
    switch (c) {
        case ObjectClass::Pillar: return "pillar";
        case ObjectClass::Torch: return "torch";
        case ObjectClass::Armor: return "armor";
        case ObjectClass::Keycard: return "keycard";
        case ObjectClass::Skullkey: return "skullkey";
        default: return "object";
    }
}

/// Canonical text for a parsed instruction: superlative, then size, then
/// color, then the class word ("object" for Any).
inline std::string format_instruction(const Instruction& in) {
    std::string s = "Go to the";
    if (in.superlative == Superlative::Largest) s += " largest";
    if (in.superlative == Superlative::Smallest) s += " smallest";
    if (in.size == SizeAttr::Short) s += " short";
    if (in.size == SizeAttr::Tall) s += " tall";
    if (in.color != Color::None) s += std::string(" ") + color_name(in.color);
    s += std::string(" ") + class_name(in.object_class);
    return s;
}

/// The 70 canonical instructions, appendix order.
inline const std::vector<std::string>& instruction_corpus() {
    static const std::vector<std::string> corpus = [] {
        std::vector<std::string> out;
        out.reserve(detail::kCorpusPhrases.size());
        for (auto p : detail::kCorpusPhrases) out.push_back("Go to the " + std::string(p));
        return out;
    }();
    return corpus;
}

namespace detail {

Instruction parse_impl(const std::string& text, bool check_canonical);

inline const std::set<std::string>& canonical_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> out;
        for (const auto& t : instruction_corpus()) out.insert(format_instruction(parse_impl(t, false)));
        return out;
    }();
    return keys;
}

inline Instruction parse_impl(const std::string& text, bool check_canonical) {
    auto words = split_words(text);
    if (words.size() < 4 || words[0] != "go" || words[1] != "to" || words[2] != "the")
        throw ParseError("instruction must start with 'Go to the': \"" + text + "\"");

    Instruction out;
    out.text = text;
    bool have_class_word = false;
    for (std::size_t i = 3; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (w == "largest" || w == "smallest") {
            if (out.superlative != Superlative::None) throw ParseError("duplicate superlative: " + w);
            out.superlative = w == "largest" ? Superlative::Largest : Superlative::Smallest;
        } else if (w == "tall" || w == "short") {
            if (out.size != SizeAttr::None) throw ParseError("duplicate size attribute: " + w);
            out.size = w == "tall" ? SizeAttr::Tall : SizeAttr::Short;
        } else if (w == "red" || w == "green" || w == "blue" || w == "yellow") {
            if (out.color != Color::None) throw ParseError("duplicate color attribute: " + w);
            out.color = w == "red" ? Color::Red : w == "green" ? Color::Green : w == "blue" ? Color::Blue
                                                                                            : Color::Yellow;
        } else if (w == "pillar" || w == "torch" || w == "armor" || w == "keycard" || w == "skullkey" ||
                   w == "object") {
            if (have_class_word) throw ParseError("duplicate object word: " + w);
            have_class_word = true;
            out.object_class = w == "pillar"     ? ObjectClass::Pillar
                               : w == "torch"    ? ObjectClass::Torch
                               : w == "armor"    ? ObjectClass::Armor
                               : w == "keycard"  ? ObjectClass::Keycard
                               : w == "skullkey" ? ObjectClass::Skullkey
                                                 : ObjectClass::Any;
        } else {
            throw ParseError("token outside grammar: '" + w + "'");
        }
    }
    if (!have_class_word) throw ParseError("instruction names no object: \"" + text + "\"");
    if (out.superlative != Superlative::None && out.size != SizeAttr::None)
        throw ParseError("superlative and size are mutually exclusive: \"" + text + "\"");
    if (out.superlative != Superlative::None && out.object_class != ObjectClass::Any)
        throw ParseError("superlatives apply to 'object' only: \"" + text + "\"");

    if (check_canonical && canonical_keys().count(format_instruction(out)) == 0)
        throw ParseError("not one of the canonical instructions: \"" + text + "\"");
    return out;
}

}  // namespace detail

/// Parses an instruction; attribute order is normalized, so "red short
/// pillar" and "short red pillar" yield identical parses.
inline Instruction parse_instruction(const std::string& text) { return detail::parse_impl(text, true); }

struct CorpusSplit {
    std::vector<std::string> train;  // 55
    std::vector<std::string> test;   // 15
};

/// Canonical deterministic split. Every token of every test instruction
/// occurs in some train instruction, and no test attribute-object
/// combination occurs in train.
inline const CorpusSplit& train_test_split() {
    static const CorpusSplit split = [] {
        CorpusSplit out;
        std::set<std::string> test_set;
        for (auto p : detail::kTestPhrases) test_set.insert("Go to the " + std::string(p));
        for (const auto& t : instruction_corpus()) {
            (test_set.count(t) ? out.test : out.train).push_back(t);
        }
        return out;
    }();
    return split;
}

/// Desk-preset training subset (10 train instructions).
inline const std::vector<std::string>& desk_instructions() {
    static const std::vector<std::string> desk = [] {
        std::vector<std::string> out;
        for (auto p : detail::kDeskPhrases) out.push_back("Go to the " + std::string(p));
        return out;
    }();
    return desk;
}

/// Sorted unique lowercased tokens of the corpus (17 types).
inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> vocab = [] {
        std::set<std::string> toks;
        for (const auto& t : instruction_corpus())
            for (const auto& w : detail::split_words(t)) toks.insert(w);
        return std::vector<std::string>(toks.begin(), toks.end());
    }();
    return vocab;
}

/// Token ids for an instruction text. Out-of-vocabulary tokens are an
/// error, not a mapped unknown.
inline std::vector<int> tokenize(const std::string& text) {
    const auto& vocab = vocabulary();
    std::vector<int> ids;
    for (const auto& w : detail::split_words(text)) {
        auto it = std::lower_bound(vocab.begin(), vocab.end(), w);
        if (it == vocab.end() || *it != w) throw VocabularyError("token outside vocabulary: '" + w + "'");
        ids.push_back(static_cast<int>(it - vocab.begin()));
    }
    if (ids.empty()) throw VocabularyError("empty instruction text");
    return ids;
}

}  // namespace gagl
