#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "screenkit/compose.hpp"
#include "screenkit/schema.hpp"

namespace screenkit {

// One annotated image: detections, OCR words, and captions in pixels.
struct AnnotationInput {
    std::string image_ref;
    double width = 0;
    double height = 0;
    std::vector<Detection> detections;
    std::vector<OcrWord> ocr_words;
    std::vector<CaptionAnnotation> captions;
};

AnnotationInput annotation_from_json(const nlohmann::json& j);
AnnotationInput parse_annotation_record(std::string_view line);

// Schema carried through JSONL pipelines (compose output, generate input).
struct SchemaRecord {
    std::string image_ref;
    double width = 0;
    double height = 0;
    std::string schema_text;
};

nlohmann::json schema_record_to_json(const SchemaRecord& r);
SchemaRecord schema_record_from_json(const nlohmann::json& j);
SchemaRecord parse_schema_record(std::string_view line);

}  // namespace screenkit
