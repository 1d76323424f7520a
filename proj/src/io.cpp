#include "screenkit/io.hpp"

namespace screenkit {

namespace {

PixelBox pixel_box_from_json(const nlohmann::json& box) {
    if (!box.is_array() || box.size() != 4) throw ParseError("box must be [ymin,xmin,ymax,xmax]");
    for (const auto& v : box)
        if (!v.is_number()) throw ParseError("box coordinates must be numbers");
    return PixelBox{box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                    box[3].get<double>()};
}

}  // namespace

AnnotationInput annotation_from_json(const nlohmann::json& j) try {
    if (!j.is_object()) throw ParseError("annotation record must be a JSON object");
    AnnotationInput out;
    out.image_ref = j.value("image_ref", std::string{});
    if (!j.contains("width") || !j.contains("height"))
        throw ParseError("annotation record needs width and height");
    out.width = j.at("width").get<double>();
    out.height = j.at("height").get<double>();

    if (j.contains("detections")) {
        for (const auto& d : j.at("detections")) {
            if (!d.contains("class")) throw ParseError("detection needs a class");
            Detection det{ElementClass{d.at("class").get<std::string>()},
                          pixel_box_from_json(d.at("box")), d.value("score", 1.0)};
            out.detections.push_back(std::move(det));
        }
    }
    if (j.contains("ocr_words")) {
        for (const auto& w : j.at("ocr_words")) {
            if (!w.contains("text")) throw ParseError("ocr word needs text");
            out.ocr_words.push_back(
                OcrWord{w.at("text").get<std::string>(), pixel_box_from_json(w.at("box"))});
        }
    }
    if (j.contains("captions")) {
        for (const auto& c : j.at("captions")) {
            if (!c.contains("text")) throw ParseError("caption needs text");
            out.captions.push_back(
                CaptionAnnotation{c.at("text").get<std::string>(), pixel_box_from_json(c.at("box"))});
        }
    }
    return out;
} catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("annotation record: ") + e.what());
}

AnnotationInput parse_annotation_record(std::string_view line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("annotation line is not valid JSON");
    try {
        return annotation_from_json(j);
    } catch (const ValueError& e) {
        throw ParseError(e.what());
    }
}

nlohmann::json schema_record_to_json(const SchemaRecord& r) {
    return nlohmann::json{{"image_ref", r.image_ref},
                          {"width", r.width},
                          {"height", r.height},
                          {"schema", r.schema_text}};
}

SchemaRecord schema_record_from_json(const nlohmann::json& j) try {
    if (!j.is_object() || !j.contains("schema"))
        throw ParseError("schema record needs a 'schema' field");
    SchemaRecord r;
    r.image_ref = j.value("image_ref", std::string{});
    r.width = j.value("width", 0.0);
    r.height = j.value("height", 0.0);
    r.schema_text = j.at("schema").get<std::string>();
    return r;
} catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema record: ") + e.what());
}

SchemaRecord parse_schema_record(std::string_view line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("schema record line is not valid JSON");
    return schema_record_from_json(j);
}

}  // namespace screenkit
