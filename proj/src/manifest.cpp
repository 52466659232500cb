#include "hmr/manifest.hpp"

#include <fstream>

#include <json.hpp>

namespace hmr {

using nlohmann::json;

std::string to_string(Lighting lighting) {
    switch (lighting) {
        case Lighting::Natural: return "natural";
        case Lighting::Dim: return "dim";
        case Lighting::Bright: return "bright";
    }
    return "natural";
}

Lighting lighting_from_string(const std::string& s) {
    if (s == "natural") return Lighting::Natural;
    if (s == "dim") return Lighting::Dim;
    if (s == "bright") return Lighting::Bright;
    throw std::invalid_argument("unknown lighting value: " + s);
}

void validate_sample(const ManifestSample& sample, int line) {
    if (sample.width < 1 || sample.height < 1)
        throw ValidationError("image dimensions must be >= 1", line);
    if (sample.image_ref.empty()) throw ValidationError("empty image reference", line);
    for (const auto& ann : sample.annotations) {
        const auto& b = ann.box_px;
        if (b.x1 > b.x2 || b.y1 > b.y2)
            throw ValidationError("inverted box for acupoint " + ann.name, line);
        if (b.x1 < 0 || b.y1 < 0 || b.x2 > sample.width || b.y2 > sample.height)
            throw ValidationError("box outside image bounds for acupoint " + ann.name, line);
        if (ann.acupoint_id < 0)
            throw ValidationError("negative acupoint_id for " + ann.name, line);
    }
}

std::vector<ManifestSample> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path, 0);
    std::vector<ManifestSample> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        ManifestSample s;
        try {
            s.image_ref = j.at("image").get<std::string>();
            s.width = j.at("width").get<int>();
            s.height = j.at("height").get<int>();
            if (j.contains("depth") && !j["depth"].is_null())
                s.depth_ref = j["depth"].get<std::string>();
            s.lighting = lighting_from_string(j.at("lighting").get<std::string>());
            s.background = j.value("background", "");
            for (const auto& a : j.at("annotations")) {
                Annotation ann;
                ann.acupoint_id = a.at("acupoint_id").get<int>();
                ann.name = a.at("name").get<std::string>();
                auto box = a.at("box_px");
                if (!box.is_array() || box.size() != 4)
                    throw ValidationError("box_px must be [x1,y1,x2,y2]", lineno);
                ann.box_px = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                              box[3].get<double>()};
                s.annotations.push_back(std::move(ann));
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("missing or ill-typed field: ") + e.what(), lineno);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what(), lineno);
        }
        validate_sample(s, lineno);
        samples.push_back(std::move(s));
    }
    return samples;
}

void save_manifest(const std::vector<ManifestSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write manifest: " + path, 0);
    for (const auto& s : samples) {
        json j;
        j["image"] = s.image_ref;
        j["width"] = s.width;
        j["height"] = s.height;
        j["depth"] = s.depth_ref ? json(*s.depth_ref) : json(nullptr);
        j["lighting"] = to_string(s.lighting);
        j["background"] = s.background;
        json anns = json::array();
        for (const auto& a : s.annotations) {
            anns.push_back({{"acupoint_id", a.acupoint_id},
                            {"name", a.name},
                            {"box_px", {a.box_px.x1, a.box_px.y1, a.box_px.x2, a.box_px.y2}}});
        }
        j["annotations"] = std::move(anns);
        out << j.dump() << "\n";
    }
}

ManifestSummary summarize(const std::vector<ManifestSample>& samples) {
    ManifestSummary sum;
    sum.images = samples.size();
    for (const auto& s : samples) sum.annotation_pairs += s.annotations.size();
    return sum;
}

} // namespace hmr
