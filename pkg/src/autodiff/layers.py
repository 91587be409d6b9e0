"""Module tree, parameterized layers and parameter bookkeeping."""

from collections import OrderedDict
from typing import Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np
import structlog

from autodiff.conv import conv2d
from autodiff.node import Node, Parameter
from autodiff.norm import BN_EPS, batch_norm
from errors import CheckpointError

logger = structlog.get_logger(__name__)


class Module:
    """Base class for layers and networks.

    Parameters and sub-modules assigned as attributes are registered in
    assignment order, which fixes parameter naming and checkpoint layout.
    """

    def __init__(self):
        object.__setattr__(self, "_parameters", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())
        object.__setattr__(self, "_buffers", OrderedDict())
        self.training = True

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        super().__setattr__(name, value)

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        self._buffers[name] = value

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for name, param in self._parameters.items():
            yield prefix + name, param
        for name, module in self._modules.items():
            yield from module.named_parameters(f"{prefix}{name}.")

    def parameters(self) -> List[Parameter]:
        return [param for _, param in self.named_parameters()]

    def named_buffers(self, prefix: str = "") -> Iterator[Tuple[str, "Module", str]]:
        """Yield ``(full_name, owner, key)`` for every non-trainable buffer."""
        for key in self._buffers:
            yield prefix + key, self, key
        for name, module in self._modules.items():
            yield from module.named_buffers(f"{prefix}{name}.")

    def assign_names(self) -> None:
        """Stamp every parameter with its dotted path; names must be unique."""
        seen = set()
        for name, param in self.named_parameters():
            if name in seen:
                raise ValueError(f"duplicate parameter name {name}")
            seen.add(name)
            param.name = name

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def train(self) -> "Module":
        self.training = True
        for module in self._modules.values():
            module.train()
        return self

    def eval(self) -> "Module":
        self.training = False
        for module in self._modules.values():
            module.eval()
        return self

    def astype(self, dtype) -> "Module":
        for param in self.parameters():
            param.astype(dtype)
        for _, owner, key in self.named_buffers():
            owner._buffers[key] = owner._buffers[key].astype(dtype)
        return self

    def state_dict(self, include_optimizer: bool = False) -> "OrderedDict[str, np.ndarray]":
        """Flat name -> array map of parameters, buffers and optionally Adam moments."""
        state: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for name, param in self.named_parameters():
            state[name] = param.value
            if include_optimizer:
                state[f"{name}.adam_m"] = param.moment1
                state[f"{name}.adam_v"] = param.moment2
        for name, owner, key in self.named_buffers():
            state[name] = np.asarray(owner._buffers[key])
        return state

    def load_state_dict(self, state: Mapping[str, np.ndarray], strict: bool = True) -> None:
        """Copy tensors from ``state``; optimizer moments are loaded when present.

        Raises:
            CheckpointError: On missing/unexpected names or shape mismatches
        """
        expected = self.state_dict(include_optimizer=False)
        missing = [name for name in expected if name not in state]
        if missing:
            raise CheckpointError(f"checkpoint is missing tensors: {', '.join(missing)}")
        if strict:
            known = set(expected)
            known.update(f"{name}.adam_{m}" for name, _ in self.named_parameters() for m in "mv")
            unexpected = [name for name in state if name not in known]
            if unexpected:
                raise CheckpointError(f"unexpected tensors in checkpoint: {', '.join(unexpected)}")

        for name, param in self.named_parameters():
            for suffix, attr in (("", "value"), (".adam_m", "moment1"), (".adam_v", "moment2")):
                key = name + suffix
                if key not in state:
                    continue
                tensor = np.asarray(state[key])
                if tensor.shape != param.value.shape:
                    raise CheckpointError(
                        f"{key}: checkpoint shape {tensor.shape} != model shape {param.value.shape}"
                    )
                setattr(param, attr, tensor.astype(param.value.dtype).copy())
        for name, owner, key in self.named_buffers():
            tensor = np.asarray(state[name])
            if tensor.shape != owner._buffers[key].shape:
                raise CheckpointError(f"{name}: checkpoint shape {tensor.shape} mismatches")
            owner._buffers[key] = tensor.astype(owner._buffers[key].dtype).copy()

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError("Subclasses of Module must implement forward")


class ModuleList(Module):
    """Ordered container registering its items under ``"0"``, ``"1"``, ..."""

    def __init__(self, modules: Iterable[Module] = ()):
        super().__init__()
        self._items: List[Module] = []
        for module in modules:
            self.append(module)

    def append(self, module: Module) -> None:
        self._modules[str(len(self._items))] = module
        self._items.append(module)

    def __getitem__(self, index: int) -> Module:
        return self._items[index]

    def __iter__(self) -> Iterator[Module]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)


def kaiming_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(np.float32)


class Conv2d(Module):
    """3x3 (or k x k) convolution with 'same' zero padding at stride 1."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel: int = 3,
        stride: int = 1,
        rng: Optional[np.random.Generator] = None,
        init_scale: float = 1.0,
    ):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng(0)
        fan_in = in_channels * kernel * kernel
        weight = kaiming_uniform(rng, (out_channels, in_channels, kernel, kernel), fan_in)
        self.weight = Parameter(weight * np.float32(init_scale))
        self.bias = Parameter(np.zeros(out_channels, dtype=np.float32))
        self.stride = stride
        self.pad = kernel // 2

    def forward(self, x: Node) -> Node:
        return conv2d(x, self.weight, self.bias, stride=self.stride, pad=self.pad)


class BatchNorm2d(Module):
    """Batch normalization with running statistics (momentum 0.1)."""

    def __init__(self, channels: int, momentum: float = 0.1, eps: float = BN_EPS):
        super().__init__()
        self.gamma = Parameter(np.ones(channels, dtype=np.float32))
        self.beta = Parameter(np.zeros(channels, dtype=np.float32))
        self.register_buffer("running_mean", np.zeros(channels, dtype=np.float32))
        self.register_buffer("running_var", np.ones(channels, dtype=np.float32))
        self.register_buffer("batches_tracked", np.zeros((), dtype=np.float32))
        self.momentum = momentum
        self.eps = eps
        self._warned = False

    def forward(self, x: Node) -> Node:
        buffers = self._buffers
        if not self.training:
            if float(buffers["batches_tracked"]) == 0 and not self._warned:
                logger.warning("batch_norm_eval_before_train", channels=x.shape[1])
                self._warned = True
            out, _, _ = batch_norm(
                x, self.gamma, self.beta, (buffers["running_mean"], buffers["running_var"]), self.eps
            )
            return out

        out, mean, var = batch_norm(x, self.gamma, self.beta, None, self.eps)
        count = x.value.size // x.shape[1]
        unbiased = var * count / max(count - 1, 1)
        m = self.momentum
        dtype = buffers["running_mean"].dtype
        buffers["running_mean"] = ((1 - m) * buffers["running_mean"] + m * mean).astype(dtype)
        buffers["running_var"] = ((1 - m) * buffers["running_var"] + m * unbiased).astype(dtype)
        buffers["batches_tracked"] = buffers["batches_tracked"] + 1
        return out


def param_count(network: Module) -> int:
    """Total element count of all trainable parameters."""
    return int(sum(param.value.size for param in network.parameters()))
