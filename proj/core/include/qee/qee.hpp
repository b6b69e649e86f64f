#pragma once

#include "qee/criterion.hpp"
#include "qee/error.hpp"
#include "qee/evolution.hpp"
#include "qee/linalg.hpp"
#include "qee/model.hpp"
#include "qee/oracle.hpp"
#include "qee/rng.hpp"
#include "qee/witness.hpp"
