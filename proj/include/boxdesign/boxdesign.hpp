#pragma once

#include "boxdesign/analytics.hpp"
#include "boxdesign/config.hpp"
#include "boxdesign/io.hpp"
#include "boxdesign/matrix.hpp"
#include "boxdesign/model.hpp"
#include "boxdesign/packer.hpp"
#include "boxdesign/pipeline.hpp"
#include "boxdesign/solver.hpp"
