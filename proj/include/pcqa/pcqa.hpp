#pragma once

#include "pcqa/codec_params.hpp"
#include "pcqa/dataset_io.hpp"
#include "pcqa/error.hpp"
#include "pcqa/fr_baselines.hpp"
#include "pcqa/kd_tree.hpp"
#include "pcqa/model_fitting.hpp"
#include "pcqa/ply.hpp"
#include "pcqa/point_cloud.hpp"
#include "pcqa/quality_model.hpp"
#include "pcqa/statistics.hpp"
