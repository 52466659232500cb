#include "hmr/grounding_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hmr {
namespace {

constexpr const char* kImgOpen = "<img>";
constexpr const char* kImgClose = "</img>";
constexpr const char* kRefOpen = "<ref>";
constexpr const char* kRefClose = "</ref>";
constexpr const char* kBoxOpen = "<box>";
constexpr const char* kBoxClose = "</box>";

void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
        ++pos;
}

bool consume(const std::string& s, size_t& pos, const char* lit) {
    size_t n = std::char_traits<char>::length(lit);
    if (s.compare(pos, n, lit) != 0) return false;
    pos += n;
    return true;
}

int parse_coord(const std::string& s, size_t& pos) {
    skip_ws(s, pos);
    size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start || pos - start > 9)
        throw MalformedToken("non-integer coordinate in <box> at offset " + std::to_string(start));
    int value = std::stoi(s.substr(start, pos - start));
    if (value < 0 || value > 999)
        throw OutOfRange("coordinate " + std::to_string(value) + " outside [0,999]");
    return value;
}

void expect(const std::string& s, size_t& pos, char c) {
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != c)
        throw MalformedToken(std::string("expected '") + c + "' in <box> at offset " +
                             std::to_string(pos));
    ++pos;
}

} // namespace

std::string serialize_prompt(const PromptSample& sample) {
    return kImgOpen + sample.image_ref + kImgClose + sample.instruction;
}

PromptSample parse_prompt(const std::string& raw) {
    size_t pos = 0;
    if (!consume(raw, pos, kImgOpen)) throw MalformedToken("prompt must start with <img>");
    size_t close = raw.find(kImgClose, pos);
    if (close == std::string::npos) throw MalformedToken("unclosed <img> tag");
    PromptSample sample;
    sample.image_ref = raw.substr(pos, close - pos);
    sample.instruction = raw.substr(close + std::char_traits<char>::length(kImgClose));
    return sample;
}

std::vector<GroundingRecord> parse_grounding_output(const std::string& raw,
                                                    const NameResolver& resolver) {
    std::vector<GroundingRecord> records;
    size_t pos = 0;
    while (true) {
        size_t ref = raw.find(kRefOpen, pos);
        if (ref == std::string::npos) break;
        pos = ref + std::char_traits<char>::length(kRefOpen);
        size_t ref_end = raw.find(kRefClose, pos);
        if (ref_end == std::string::npos) throw MalformedToken("unclosed <ref> tag");
        std::string name = raw.substr(pos, ref_end - pos);
        pos = ref_end + std::char_traits<char>::length(kRefClose);

        skip_ws(raw, pos);
        if (!consume(raw, pos, kBoxOpen))
            throw MalformedToken("<ref>" + name + "</ref> not followed by <box>");

        NormalizedBox box;
        expect(raw, pos, '(');
        box.x1 = parse_coord(raw, pos);
        expect(raw, pos, ',');
        box.y1 = parse_coord(raw, pos);
        expect(raw, pos, ')');
        expect(raw, pos, ',');
        expect(raw, pos, '(');
        box.x2 = parse_coord(raw, pos);
        expect(raw, pos, ',');
        box.y2 = parse_coord(raw, pos);
        expect(raw, pos, ')');
        skip_ws(raw, pos);
        if (!consume(raw, pos, kBoxClose)) throw MalformedToken("unclosed <box> tag");

        if (!box.valid())
            throw MalformedToken("inverted box for " + name);

        GroundingRecord rec;
        rec.name = std::move(name);
        rec.box = box;
        rec.acupoint_id = resolver ? resolver(rec.name) : -1;
        records.push_back(std::move(rec));
    }
    return records;
}

std::string serialize_grounding_output(const std::vector<GroundingRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "(%d,%d),(%d,%d)", r.box.x1, r.box.y1, r.box.x2, r.box.y2);
        out += kRefOpen;
        out += r.name;
        out += kRefClose;
        out += kBoxOpen;
        out += buf;
        out += kBoxClose;
    }
    return out;
}

namespace {
int normalize_coord(double c, int extent, const char* axis) {
    if (c < 0.0 || c > static_cast<double>(extent))
        throw InvalidBox(std::string(axis) + " coordinate outside image");
    int n = static_cast<int>(std::floor(c * 1000.0 / extent));
    return std::clamp(n, 0, 999);
}
} // namespace

NormalizedBox normalize_box(const PixelBox& px, int width, int height) {
    if (width < 1 || height < 1) throw InvalidBox("image dimensions must be >= 1");
    if (px.x1 > px.x2 || px.y1 > px.y2) throw InvalidBox("inverted pixel box");
    NormalizedBox box;
    box.x1 = normalize_coord(px.x1, width, "x1");
    box.y1 = normalize_coord(px.y1, height, "y1");
    box.x2 = normalize_coord(px.x2, width, "x2");
    box.y2 = normalize_coord(px.y2, height, "y2");
    return box;
}

PixelBox denormalize_box(const NormalizedBox& box, int width, int height) {
    auto cell = [](int n, int extent) { return (n + 0.5) * extent / 1000.0; };
    return {cell(box.x1, width), cell(box.y1, height), cell(box.x2, width), cell(box.y2, height)};
}

std::pair<double, double> box_center(const NormalizedBox& box, int width, int height) {
    PixelBox px = denormalize_box(box, width, height);
    return {0.5 * (px.x1 + px.x2), 0.5 * (px.y1 + px.y2)};
}

} // namespace hmr
