#pragma once

#include <string>
#include <vector>

#include "eis/asymptotics.hpp"
#include "eis/forward.hpp"
#include "eis/mesh.hpp"
#include "eis/reconstruct.hpp"

namespace eis {

// All text artifacts are rendered through these builders with "%.17g" float
// formatting and "\n" line endings, so identical inputs yield identical bytes.
std::string format_g17(double v);

// Columns: omega,j,k,re_V,im_V (256 data rows).
std::string frame_csv(const Frame& frame);

// Columns: node_id,re_u,im_u.
std::string field_csv(const std::vector<Complex>& u);

// Columns: triangle_id,delta_sigma,delta_epsilon.
std::string image_csv(const AdmittivityImage& image);

// Mesh tables: (id,x,y), (id,n1,n2,n3,region), (electrode_id,node_id,order).
std::string nodes_csv(const Mesh& mesh);
std::string triangles_csv(const Mesh& mesh);
std::string electrodes_csv(const Mesh& mesh);

// Columns: frequency_hz,re_lambda_c,im_lambda_c,re_lambda_d,im_lambda_d.
std::string contrast_table_csv(const Scene& scene, const std::vector<double>& frequencies_hz);

// 256x256 plain-text PGM of a per-triangle field over the disk bounding box,
// linearly scaled so min -> 0 and max -> 255 (constant field and pixels
// outside the domain render as 0); the scale bounds are recorded in a header
// comment.
std::string pgm_raster(const Mesh& mesh, const std::vector<double>& tri_values);

// {cracks:[{P,Q,residue}], bars:[{z,strength}], residual}
std::string pole_report_json(const MeromorphicModel& model, double residual);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace eis
