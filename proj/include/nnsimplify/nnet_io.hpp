// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace nnsimplify {

/// In-memory image of an NNet text file.
///
/// Layout of the format, line by line:
///   - any number of comment lines starting with "//"
///   - counts: numLayers,inputSize,outputSize,maxLayerSize
///   - layer sizes, input layer first, output layer last
///   - an unused flag line (conventionally a single "0"), kept verbatim
///   - input minimums, input maximums
///   - normalization means and ranges (one entry per input plus one shared
///     output entry)
///   - per weight layer: one line per destination neuron holding its weight
///     row, then one line per destination neuron holding its bias
/// All numeric lines are comma separated; a trailing comma is tolerated on
/// input and emitted on output, matching the published files.
struct NNetDocument {
    std::vector<std::string> header_comments;  // verbatim, including "//"
    int num_layers = 0;                        // number of weight layers
    int input_size = 0;
    int output_size = 0;
    int max_layer_size = 0;
    std::vector<int> layer_sizes;              // num_layers + 1 entries
    std::string flag_line = "0,";              // unused by the format
    std::vector<double> input_mins;
    std::vector<double> input_maxes;
    std::vector<double> means;                 // input_size + 1 entries
    std::vector<double> ranges;                // input_size + 1 entries, > 0
    std::vector<Matrix> weights;               // weights[i]: layer i -> i+1
    std::vector<std::vector<double>> biases;

    bool operator==(const NNetDocument&) const = default;
};

namespace nnet_detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline bool is_blank(std::string_view s) { return trim(s).empty(); }

/// Comma-separated tokens; one trailing empty token (from a trailing comma)
/// is dropped.
inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    if (fields.size() > 1 && fields.back().empty()) fields.pop_back();
    return fields;
}

inline double parse_double(std::string_view token, std::size_t line_no) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || token.empty()) {
        raise(ErrorKind::NonNumericToken,
              "line " + std::to_string(line_no) + ": '" + std::string(token) + "'");
    }
    return value;
}

inline int parse_int(std::string_view token, std::size_t line_no, ErrorKind kind) {
    int value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || token.empty()) {
        raise(kind, "line " + std::to_string(line_no) + ": '" + std::string(token) + "'");
    }
    return value;
}

inline void render_double(std::string& out, double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    out.append(buf, ptr);
}

/// Cursor over non-blank lines.
class LineCursor {
public:
    explicit LineCursor(std::vector<std::string_view> lines) : lines_(std::move(lines)) {}

    bool done() {
        skip_blanks();
        return pos_ >= lines_.size();
    }

    std::string_view next(const char* what) {
        skip_blanks();
        if (pos_ >= lines_.size()) {
            raise(ErrorKind::DimensionMismatch,
                  std::string("unexpected end of file, expected ") + what);
        }
        line_no_ = pos_ + 1;
        return lines_[pos_++];
    }

    std::string_view peek() {
        skip_blanks();
        return pos_ < lines_.size() ? lines_[pos_] : std::string_view{};
    }

    std::size_t line_no() const { return line_no_; }

private:
    void skip_blanks() {
        while (pos_ < lines_.size() && is_blank(lines_[pos_])) ++pos_;
    }

    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

inline std::vector<double> parse_vector(LineCursor& cur, std::size_t expected, const char* what) {
    std::vector<std::string_view> fields = split_fields(cur.next(what));
    if (fields.size() != expected) {
        raise(ErrorKind::DimensionMismatch,
              std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                  std::to_string(fields.size()) + " on line " + std::to_string(cur.line_no()));
    }
    std::vector<double> values;
    values.reserve(expected);
    for (std::string_view f : fields) values.push_back(parse_double(f, cur.line_no()));
    return values;
}

}  // namespace nnet_detail

/// Checks the structural invariants of a document; throws on violation.
inline void validate(const NNetDocument& doc) {
    if (doc.num_layers < 1 || doc.input_size < 1 || doc.output_size < 1) {
        raise(ErrorKind::MalformedHeader, "counts must be positive");
    }
    if (doc.layer_sizes.size() != static_cast<std::size_t>(doc.num_layers) + 1) {
        raise(ErrorKind::DimensionMismatch, "layer size list does not match layer count");
    }
    if (doc.layer_sizes.front() != doc.input_size || doc.layer_sizes.back() != doc.output_size) {
        raise(ErrorKind::DimensionMismatch, "layer sizes disagree with declared input/output size");
    }
    for (int s : doc.layer_sizes) {
        if (s < 1) raise(ErrorKind::DimensionMismatch, "layer sizes must be positive");
    }
    const auto d = static_cast<std::size_t>(doc.input_size);
    if (doc.input_mins.size() != d || doc.input_maxes.size() != d) {
        raise(ErrorKind::DimensionMismatch, "input bound vectors must match input size");
    }
    if (doc.means.size() != d + 1 || doc.ranges.size() != d + 1) {
        raise(ErrorKind::DimensionMismatch, "normalization vectors must have inputSize+1 entries");
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (doc.input_mins[j] > doc.input_maxes[j]) {
            raise(ErrorKind::MalformedHeader,
                  "input minimum exceeds maximum at index " + std::to_string(j));
        }
    }
    for (double r : doc.ranges) {
        if (!(r > 0.0)) raise(ErrorKind::NonPositiveRange, "range entries must be positive");
    }
    if (doc.weights.size() != static_cast<std::size_t>(doc.num_layers) ||
        doc.biases.size() != static_cast<std::size_t>(doc.num_layers)) {
        raise(ErrorKind::DimensionMismatch, "weight/bias block count does not match layer count");
    }
    for (int i = 0; i < doc.num_layers; ++i) {
        const auto rows = static_cast<std::size_t>(doc.layer_sizes[i + 1]);
        const auto cols = static_cast<std::size_t>(doc.layer_sizes[i]);
        if (doc.weights[i].rows() != rows || doc.weights[i].cols() != cols) {
            raise(ErrorKind::DimensionMismatch, "weight matrix " + std::to_string(i) +
                                                    " has wrong shape");
        }
        if (doc.biases[i].size() != rows) {
            raise(ErrorKind::DimensionMismatch, "bias vector " + std::to_string(i) +
                                                    " has wrong length");
        }
    }
    for (const std::string& c : doc.header_comments) {
        if (c.rfind("//", 0) != 0) {
            raise(ErrorKind::MalformedHeader, "header comments must start with //");
        }
    }
}

/// Parses the complete content of an NNet file.
inline NNetDocument parse_nnet(std::string_view text) {
    using namespace nnet_detail;
    NNetDocument doc;
    LineCursor cur(split_lines(text));

    while (!cur.done() && cur.peek().rfind("//", 0) == 0) {
        doc.header_comments.emplace_back(cur.next("comment"));
    }
    if (cur.done()) raise(ErrorKind::MalformedHeader, "missing counts line");

    {
        std::vector<std::string_view> fields = split_fields(cur.next("counts line"));
        if (fields.size() != 4) {
            raise(ErrorKind::MalformedHeader, "counts line must hold exactly 4 values");
        }
        doc.num_layers = parse_int(fields[0], cur.line_no(), ErrorKind::MalformedHeader);
        doc.input_size = parse_int(fields[1], cur.line_no(), ErrorKind::MalformedHeader);
        doc.output_size = parse_int(fields[2], cur.line_no(), ErrorKind::MalformedHeader);
        doc.max_layer_size = parse_int(fields[3], cur.line_no(), ErrorKind::MalformedHeader);
        if (doc.num_layers < 1 || doc.input_size < 1 || doc.output_size < 1 ||
            doc.max_layer_size < 1) {
            raise(ErrorKind::MalformedHeader, "counts must be positive");
        }
    }

    {
        std::vector<std::string_view> fields = split_fields(cur.next("layer sizes"));
        if (fields.size() != static_cast<std::size_t>(doc.num_layers) + 1) {
            raise(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(doc.num_layers + 1) + " layer sizes, got " +
                      std::to_string(fields.size()));
        }
        for (std::string_view f : fields) {
            doc.layer_sizes.push_back(parse_int(f, cur.line_no(), ErrorKind::NonNumericToken));
        }
    }

    doc.flag_line = std::string(cur.next("flag line"));

    const auto d = static_cast<std::size_t>(doc.input_size);
    doc.input_mins = parse_vector(cur, d, "input minimums");
    doc.input_maxes = parse_vector(cur, d, "input maximums");
    doc.means = parse_vector(cur, d + 1, "means");
    doc.ranges = parse_vector(cur, d + 1, "ranges");

    for (int i = 0; i < doc.num_layers; ++i) {
        const auto rows = static_cast<std::size_t>(doc.layer_sizes[i + 1]);
        const auto cols = static_cast<std::size_t>(doc.layer_sizes[i]);
        Matrix w(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> row = parse_vector(cur, cols, "weight row");
            for (std::size_t c = 0; c < cols; ++c) w.at(r, c) = row[c];
        }
        std::vector<double> b;
        b.reserve(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            b.push_back(parse_vector(cur, 1, "bias entry")[0]);
        }
        doc.weights.push_back(std::move(w));
        doc.biases.push_back(std::move(b));
    }

    if (!cur.done()) {
        raise(ErrorKind::DimensionMismatch,
              "trailing content after the last bias block");
    }

    validate(doc);
    return doc;
}

/// Serializes a document. Numbers use the shortest decimal rendering that
/// parses back to the identical double, so parse(write(doc)) == doc.
inline std::string write_nnet(const NNetDocument& doc) {
    using namespace nnet_detail;
    validate(doc);

    std::string out;
    for (const std::string& c : doc.header_comments) {
        out += c;
        out += '\n';
    }

    auto write_ints = [&out](std::span<const int> values) {
        for (int v : values) {
            out += std::to_string(v);
            out += ',';
        }
        out += '\n';
    };
    auto write_doubles = [&out](std::span<const double> values) {
        for (double v : values) {
            render_double(out, v);
            out += ',';
        }
        out += '\n';
    };

    const int counts[4] = {doc.num_layers, doc.input_size, doc.output_size, doc.max_layer_size};
    write_ints(counts);
    write_ints(doc.layer_sizes);
    out += doc.flag_line;
    out += '\n';
    write_doubles(doc.input_mins);
    write_doubles(doc.input_maxes);
    write_doubles(doc.means);
    write_doubles(doc.ranges);

    for (int i = 0; i < doc.num_layers; ++i) {
        for (std::size_t r = 0; r < doc.weights[i].rows(); ++r) {
            write_doubles(doc.weights[i].row(r));
        }
        for (double b : doc.biases[i]) {
            write_doubles({&b, 1});
        }
    }
    return out;
}

}  // namespace nnsimplify
