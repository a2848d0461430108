#include "lcf/report.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"

#include "lcf/io.hpp"

namespace lcf {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& vs) {
    json out = json::array();
    for (double v : vs) out.push_back(number(v));
    return out;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string pipeline_report_json(const PipelineReport& r, int indent) {
    json doc;
    doc["dim"] = r.dim;
    doc["lambda_requested"] = number(r.lambda_requested);
    doc["lambda_1"] = number(r.lambda_1);
    doc["initial_mass"] = number(r.initial_mass);
    doc["initial_polar_mass"] = number(r.initial_polar_mass);
    doc["initial_product"] = number(r.initial_product);
    doc["bound"] = number(r.bound);
    doc["aborted"] = r.aborted;
    doc["error"] = r.error;
    doc["passed"] = r.passed();
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"i", s.i},
                         {"axis", s.hyperplane.axis},
                         {"offset", number(s.hyperplane.offset)},
                         {"lambda", number(s.lambda)},
                         {"z", numbers(s.z)},
                         {"mass", number(s.mass)},
                         {"polar_mass", number(s.polar_mass)},
                         {"pre_polar_mass", number(s.pre_polar_mass)},
                         {"product", number(s.product)},
                         {"involution_residual", number(s.involution_residual)},
                         {"santalo_converged", s.santalo_converged}});
    }
    doc["steps"] = std::move(steps);
    doc["final_symmetry_defects"] = numbers(r.final_symmetry_defects);
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"name", v.name},
                            {"passed", v.passed},
                            {"value", number(v.value)},
                            {"threshold", number(v.threshold)},
                            {"detail", v.detail}});
    doc["verdicts"] = std::move(verdicts);
    return doc.dump(indent);
}

void write_pipeline_csv(std::ostream& out, const PipelineReport& r) {
    out << "i,axis,offset,lambda,z,mass,polar_mass,pre_polar_mass,product,involution_residual,santalo_converged\n";
    for (const auto& s : r.steps) {
        std::string z;
        for (std::size_t k = 0; k < s.z.size(); ++k) z += (k ? ";" : "") + format_double(s.z[k]);
        out << s.i << ',' << s.hyperplane.axis << ',' << format_double(s.hyperplane.offset) << ','
            << format_double(s.lambda) << ',' << z << ',' << format_double(s.mass) << ','
            << format_double(s.polar_mass) << ',' << format_double(s.pre_polar_mass) << ','
            << format_double(s.product) << ',' << format_double(s.involution_residual) << ','
            << (s.santalo_converged ? "true" : "false") << '\n';
    }
}

void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts) {
    out << "name,passed,value,threshold,detail\n";
    for (const auto& v : verdicts)
        out << v.name << ',' << (v.passed ? "true" : "false") << ',' << format_double(v.value) << ','
            << format_double(v.threshold) << ',' << csv_quote(v.detail) << '\n';
}

}  // namespace lcf
