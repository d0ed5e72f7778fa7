#include "magkerr/errors.hpp"
#include "magkerr/sweep.hpp"

#include "json.hpp"

#include <cstdio>
#include <string>

namespace magkerr {

namespace {

constexpr const char* kSchema = "magkerr.sweep/1";

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string emit_csv(const SweepResult& r) {
    std::string out = std::string(axis_info(r.axis1.name).column);
    if (r.axis2) out += "," + std::string(axis_info(r.axis2->name).column);
    out += ",status";
    for (const auto& c : r.columns) out += "," + c;
    out += '\n';

    for (const auto& rec : r.records) {
        out += format_number(rec.x1);
        if (r.axis2) out += "," + (rec.x2 ? format_number(*rec.x2) : std::string());
        out += ",";
        out += to_string(rec.status);
        for (const auto& v : rec.values) {
            out += ",";
            if (v) out += format_number(*v);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json axis_json(const SweepAxis& a) {
    return {{"name", a.name},
            {"column", std::string(axis_info(a.name).column)},
            {"start", a.start},
            {"stop", a.stop},
            {"count", a.count}};
}

SweepAxis axis_from(const nlohmann::json& j) {
    SweepAxis a;
    a.name = j.at("name").get<std::string>();
    a.start = j.at("start").get<double>();
    a.stop = j.at("stop").get<double>();
    a.count = j.at("count").get<std::size_t>();
    return a;
}

std::string emit_json(const SweepResult& r) {
    nlohmann::json doc;
    doc["schema"] = kSchema;
    doc["mode"] = std::string(to_string(r.mode));
    doc["branch_policy"] = std::string(to_string(r.policy));
    doc["axes"] = nlohmann::json::array({axis_json(r.axis1)});
    if (r.axis2) doc["axes"].push_back(axis_json(*r.axis2));
    doc["columns"] = r.columns;

    auto& records = doc["records"] = nlohmann::json::array();
    for (const auto& rec : r.records) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto& v : rec.values) values.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        nlohmann::json row = {{"i", rec.i}, {"j", rec.j}, {"x1", rec.x1}};
        if (rec.x2) row["x2"] = *rec.x2;
        row["status"] = std::string(to_string(rec.status));
        row["values"] = std::move(values);
        records.push_back(std::move(row));
    }
    return doc.dump(1) + "\n";
}

}  // namespace

TableFormat parse_table_format(std::string_view text) {
    if (text == "csv") return TableFormat::Csv;
    if (text == "json") return TableFormat::Json;
    throw InvalidInput("unknown format '" + std::string(text) + "' (csv|json)");
}

std::string emit_table(const SweepResult& result, TableFormat format) {
    return format == TableFormat::Csv ? emit_csv(result) : emit_json(result);
}

SweepResult sweep_from_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("schema").get<std::string>() != kSchema) {
            throw InvalidInput("unsupported sweep schema '" + doc.at("schema").get<std::string>() + "'");
        }
        SweepResult r;
        r.mode = parse_coupling_mode(doc.at("mode").get<std::string>());
        r.policy = parse_branch_policy(doc.at("branch_policy").get<std::string>());
        const auto& axes = doc.at("axes");
        if (axes.empty() || axes.size() > 2) throw InvalidInput("sweep document needs one or two axes");
        r.axis1 = axis_from(axes.at(0));
        if (axes.size() == 2) r.axis2 = axis_from(axes.at(1));
        r.columns = doc.at("columns").get<std::vector<std::string>>();

        for (const auto& row : doc.at("records")) {
            SweepRecord rec;
            rec.i = row.at("i").get<std::size_t>();
            rec.j = row.at("j").get<std::size_t>();
            rec.x1 = row.at("x1").get<double>();
            if (row.contains("x2")) rec.x2 = row.at("x2").get<double>();
            rec.status = parse_point_status(row.at("status").get<std::string>());
            for (const auto& v : row.at("values")) {
                rec.values.push_back(v.is_null() ? std::optional<double>() : std::optional<double>(v.get<double>()));
            }
            if (rec.values.size() != r.columns.size()) throw InvalidInput("record width does not match columns");
            r.records.push_back(std::move(rec));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed sweep document: ") + e.what());
    }
}

}  // namespace magkerr
