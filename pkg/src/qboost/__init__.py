"""Quantum AdaBoost over simulated parameterized quantum circuits."""

__version__ = "0.1.0"

from .qstate import (DensityMatrix, HermitianOperator, StateVector,
                     basis_state, embed_local_operator, embed_on_qubits,
                     expectation, ground_state, maximally_mixed, partial_trace)
from .circuit import (CNOT, FixedRotation, FixedUnitary, MeasurementSpec,
                      ParamCircuit, PauliString, PoolingUnit, TrainableRotation,
                      computational_measurement, decompose_rotation, dump_circuit,
                      pauli_rotation_matrix, rotation_spectral_distance)
from .engine import class_probabilities, execute, z_expectation_on
from .noise import (KrausChannel, NoiseModel, amplitude_damping, apply_channel,
                    depolarizing, make_noise_model, phase_damping)
from .qcnn import build_qcnn
from .learner import (AdamState, BaseClassifier, TrainConfig, WeightedDataset,
                      adam_step, cross_entropy_loss, param_shift_gradient,
                      predict, predict_batch, train_base, weighted_error)
from .boost import (BoostReport, BoundDecomposition, BoundInputs, Ensemble,
                    WeakLearnerFailure, bagging, boost_binary, boost_multiclass,
                    covering_number_bound, ensemble_predict,
                    ensemble_predict_batch, full_risk_bound, rademacher_bound,
                    training_bound)
from .annni import (AnnniPoint, annni_hamiltonian, annni_label, critical_field,
                    generate_annni_dataset, load_annni_dataset, save_annni_dataset)
from .mnist import (BadMagicError, IdxFormatError, RawImage,
                    TruncatedPayloadError, ZeroVectorError, amplitude_encode,
                    build_mnist_task, downsample, encode_image,
                    generate_synthetic_digits, parse_idx, write_idx_images,
                    write_idx_labels)
from .experiments import ExperimentConfig, RunRecord, run_experiment
from .tolerances import TOL, Tolerances
