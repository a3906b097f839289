#pragma once

// Copy of config/schema.json compiled into the tools; a test keeps the two identical.

namespace restless {

inline constexpr const char* kConfigSchema = R"schema({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "restless tuneup experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "required": [
    "rng",
    "physics"
  ],
  "properties": {
    "rng": {
      "type": "object",
      "properties": {
        "algorithm": {
          "type": "string",
          "enum": [
            "mt19937_64/restless-v1"
          ]
        },
        "master_seed": {
          "type": "integer",
          "minimum": 0
        }
      },
      "required": [
        "algorithm",
        "master_seed"
      ],
      "additionalProperties": false
    },
    "output_dir": {
      "type": "string"
    },
    "physics": {
      "type": "object",
      "properties": {
        "t1_mean_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "t1_psd": {
          "type": "object",
          "properties": {
            "alpha_s2_per_hz": {
              "type": "number",
              "minimum": 0
            },
            "beta": {
              "type": "number",
              "exclusiveMinimum": -2,
              "maximum": 0
            }
          },
          "required": [
            "alpha_s2_per_hz",
            "beta"
          ],
          "additionalProperties": false
        },
        "tau_p_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "tau_cl_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "tau_m_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "tau_ro_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "p_s_c": {
          "type": "number",
          "minimum": 0,
          "maximum": 1
        },
        "opt": {
          "type": "object",
          "properties": {
            "a_g": {
              "type": "number",
              "exclusiveMinimum": 0
            },
            "a_d": {
              "type": "number"
            },
            "f_detuning_hz": {
              "type": "number"
            }
          },
          "required": [
            "a_d",
            "a_g",
            "f_detuning_hz"
          ],
          "additionalProperties": false
        },
        "curvatures": {
          "type": "object",
          "properties": {
            "c_g": {
              "type": "number",
              "minimum": 0
            },
            "c_d": {
              "type": "number",
              "minimum": 0
            },
            "c_f": {
              "type": "number",
              "minimum": 0
            }
          },
          "required": [
            "c_d",
            "c_f",
            "c_g"
          ],
          "additionalProperties": false
        },
        "leak_curvature": {
          "type": "number",
          "minimum": 0
        },
        "p_pulse_floor": {
          "type": "number",
          "minimum": 0,
          "maximum": 1
        },
        "p_leak_floor": {
          "type": "number",
          "minimum": 0,
          "maximum": 1
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "acquisition": {
      "type": "object",
      "properties": {
        "n_shots": {
          "type": "integer",
          "minimum": 2
        },
        "n_seeds": {
          "type": "integer",
          "minimum": 1
        },
        "init_wait_s": {
          "type": "number",
          "minimum": 0
        },
        "fluctuating_t1": {
          "type": "boolean"
        },
        "t1_trace_dt_s": {
          "type": "number",
          "exclusiveMinimum": 0
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "overhead": {
      "type": "object",
      "properties": {
        "set_params_s": {
          "type": "number",
          "minimum": 0
        },
        "process_s": {
          "type": "number",
          "minimum": 0
        },
        "misc_s": {
          "type": "number",
          "minimum": 0
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "optimizer": {
      "type": "object",
      "properties": {
        "max_evaluations_per_step": {
          "type": "integer",
          "minimum": 1
        },
        "cost_spread_rel": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "noise_spread_z": {
          "type": "number",
          "minimum": 0
        },
        "coefficients": {
          "type": "object",
          "properties": {
            "reflection": {
              "type": "number",
              "exclusiveMinimum": 0
            },
            "expansion": {
              "type": "number",
              "exclusiveMinimum": 0
            },
            "contraction": {
              "type": "number",
              "exclusiveMinimum": 0,
              "exclusiveMaximum": 1
            },
            "shrink": {
              "type": "number",
              "exclusiveMinimum": 0,
              "exclusiveMaximum": 1
            }
          },
          "required": [
            "contraction",
            "expansion",
            "reflection",
            "shrink"
          ],
          "additionalProperties": false
        },
        "step1": {
          "type": "object",
          "properties": {
            "n_cl": {
              "type": "integer",
              "minimum": 1
            },
            "rel_a_g": {
              "type": "number"
            },
            "rel_a_d": {
              "type": "number"
            },
            "f_hz": {
              "type": "number"
            }
          },
          "required": [
            "f_hz",
            "n_cl",
            "rel_a_d",
            "rel_a_g"
          ],
          "additionalProperties": false
        },
        "step2": {
          "type": "object",
          "properties": {
            "n_cl": {
              "type": "integer",
              "minimum": 1
            },
            "rel_a_g": {
              "type": "number"
            },
            "rel_a_d": {
              "type": "number"
            },
            "f_hz": {
              "type": "number"
            }
          },
          "required": [
            "f_hz",
            "n_cl",
            "rel_a_d",
            "rel_a_g"
          ],
          "additionalProperties": false
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "noise_model": {
      "type": "object",
      "properties": {
        "p_s_c": {
          "type": "number",
          "minimum": 0,
          "maximum": 1
        },
        "t1_mean_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "t1_sigma_s": {
          "type": "number",
          "minimum": 0
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "tuneup": {
      "type": "object",
      "properties": {
        "n_params": {
          "type": "integer",
          "enum": [
            2,
            3
          ]
        },
        "start_conditions": {
          "type": "array",
          "minItems": 1,
          "items": {
            "type": "integer",
            "minimum": 0,
            "maximum": 3
          }
        },
        "detuning_start_hz": {
          "type": "number"
        },
        "crb_n_cl": {
          "type": "array",
          "minItems": 3,
          "items": {
            "type": "integer",
            "minimum": 1
          }
        },
        "crb_repetitions": {
          "type": "integer",
          "minimum": 2
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "landscape": {
      "type": "object",
      "properties": {
        "n_cl": {
          "type": "integer",
          "minimum": 1
        },
        "a_g": {
          "type": "object",
          "properties": {
            "lo": {
              "type": "number"
            },
            "hi": {
              "type": "number"
            },
            "count": {
              "type": "integer",
              "minimum": 1
            },
            "log": {
              "type": "boolean"
            }
          },
          "required": [
            "count",
            "hi",
            "lo"
          ],
          "additionalProperties": false
        },
        "a_d": {
          "type": "object",
          "properties": {
            "lo": {
              "type": "number"
            },
            "hi": {
              "type": "number"
            },
            "count": {
              "type": "integer",
              "minimum": 1
            },
            "log": {
              "type": "boolean"
            }
          },
          "required": [
            "count",
            "hi",
            "lo"
          ],
          "additionalProperties": false
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "rb": {
      "type": "object",
      "properties": {
        "n_cl": {
          "type": "array",
          "minItems": 3,
          "items": {
            "type": "integer",
            "minimum": 1
          }
        },
        "repetitions": {
          "type": "integer",
          "minimum": 1
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "snr": {
      "type": "object",
      "properties": {
        "f_a": {
          "type": "array",
          "minItems": 1,
          "items": {
            "type": "number",
            "exclusiveMinimum": 0.5,
            "maximum": 1
          }
        },
        "n_cl": {
          "type": "object",
          "properties": {
            "lo": {
              "type": "integer",
              "minimum": 1
            },
            "hi": {
              "type": "integer",
              "minimum": 1
            },
            "count": {
              "type": "integer",
              "minimum": 1
            }
          },
          "required": [
            "count",
            "hi",
            "lo"
          ],
          "additionalProperties": false
        },
        "blocks": {
          "type": "integer",
          "minimum": 1
        },
        "reps_per_block": {
          "type": "integer",
          "minimum": 2
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "psd": {
      "type": "object",
      "properties": {
        "n_segments": {
          "type": "integer",
          "minimum": 1
        },
        "segment_length": {
          "type": "integer",
          "minimum": 2
        },
        "dt_s": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "f_l_hz": {
          "type": "number",
          "exclusiveMinimum": 0
        },
        "f_u_hz": {
          "type": "number",
          "exclusiveMinimum": 0
        }
      },
      "required": [],
      "additionalProperties": false
    },
    "timing": {
      "type": "object",
      "properties": {
        "n_cl": {
          "type": "integer",
          "minimum": 0
        }
      },
      "required": [],
      "additionalProperties": false
    }
  }
}
)schema";

}  // namespace restless
