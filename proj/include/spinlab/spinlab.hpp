#pragma once

#include "analysis.hpp"
#include "closed_form.hpp"
#include "entangle.hpp"
#include "errors.hpp"
#include "gibbs.hpp"
#include "linalg.hpp"
#include "spin_model.hpp"
