import math
import types


class Options:
    """
    Brinda un mecanismo simple para que una clase exponga las opciones que admite, además de facilitar
    el manejo y la validación de las mismas.

    Lo único que se debe hacer es:

    1- Crear una clase descendiente de Options.
    2- Asignarle a la variable estática OPTIONS una lista de Option, con todas las posibles
       opciones que la clase admite.
    3- A cada opción se accede a través del objeto _options, o directamente como atributo de
       solo lectura de la instancia (ej.: params.gamma).
    4- El consumer especifica las opciones a modificar a través del constructor, cuyo último parámetro
       debe ser un **kwargs. Toda opción no especificada toma su valor por defecto, y todas se validan.

    @raise InvalidOptionError: si se especifica una opción desconocida, o un valor fuera de rango.
    """

    OPTIONS = []

    def __init__(self, **options):
        self._options = types.SimpleNamespace()

        knownNames = {option.name for option in type(self).OPTIONS}
        unknownNames = sorted(name for name in options if name not in knownNames)
        if unknownNames:
            raise InvalidOptionError(unknownNames[0], "opción desconocida para {0}".format(type(self).__name__))

        for option in type(self).OPTIONS:
            value = options[option.name] if option.name in options else option.value
            setattr(self._options, option.name, option.validate(value))

    def __getattr__(self, item):
        # Solo se llega acá cuando el atributo no existe en la instancia.
        options = self.__dict__.get("_options")
        if options is not None and hasattr(options, item):
            return getattr(options, item)

        raise AttributeError("'{0}' object has no attribute '{1}'".format(self.__class__.__name__, item))

    def __eq__(self, other):
        return type(self) is type(other) and self.toDict() == other.toDict()

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.toDict().items(), key=lambda item: item[0]))))

    def __repr__(self):
        return "{0}({1})".format(type(self).__name__, ", ".join("{0}={1!r}".format(k, v) for k, v in self.toDict().items()))

    def toDict(self):
        """
        Retorna todas las opciones, en el orden en que fueron declaradas.

        @return: un diccionario.
                 Key: el nombre de la opción.
                 Value: el valor de la opción.
        """
        return {option.name: getattr(self._options, option.name) for option in type(self).OPTIONS}

    def replace(self, **options):
        """
        Retorna una nueva instancia con las mismas opciones, salvo las especificadas.
        """
        values = self.toDict()
        values.update(options)
        return type(self)(**values)

    @classmethod
    def getOption(cls, optionName):
        return next((option for option in cls.OPTIONS if option.name == optionName), None)


class Option:
    def __init__(self, name, value, choices=None, description=None, kind=None, minimum=None, maximum=None,
                 minimumExclusive=False, maximumExclusive=False):
        """
        @param name: el nombre de la opción.
        @param value: el valor por defecto.
        @param choices: los valores permitidos, o None si se admite cualquiera.
        @param kind: el tipo al que se convierte el valor (float, int, str, tuple...). Por defecto, el tipo del
                     valor por defecto.
        @param minimum: el mínimo admitido, o None.
        @param minimumExclusive: indica si el mínimo es excluyente.
        @param maximum: el máximo admitido, o None.
        @param maximumExclusive: indica si el máximo es excluyente.
        """
        self.name = name
        self.value = value
        self.choices = choices
        self.description = description
        self.kind = kind or type(value)
        self.minimum = minimum
        self.maximum = maximum
        self.minimumExclusive = minimumExclusive
        self.maximumExclusive = maximumExclusive

    def validate(self, value):
        """
        Convierte el valor al tipo de la opción y comprueba que esté dentro del rango permitido.

        @return: el valor convertido.

        @raise InvalidOptionError: si el valor no es válido.
        """
        if isinstance(value, bool) and self.kind is not bool:
            raise InvalidOptionError(self.name, "se esperaba un valor de tipo {0}".format(self.kind.__name__))

        try:
            if self.kind is int:
                converted = int(value)
                if converted != value and not isinstance(value, str):
                    raise ValueError(value)
            else:
                converted = self.kind(value)
        except (TypeError, ValueError) as e:
            if isinstance(self.kind, type):
                raise InvalidOptionError(self.name, "el valor {0!r} no es de tipo {1}".format(value, self.kind.__name__))
            # kind es una función de conversión: su mensaje ya describe el problema.
            raise InvalidOptionError(self.name, str(e))

        if self.kind is float and not math.isfinite(converted):
            raise InvalidOptionError(self.name, "el valor {0!r} no es finito".format(converted))

        if self.choices is not None:
            invalid = [c for c in (converted if isinstance(converted, tuple) else (converted,)) if c not in self.choices]
            if invalid:
                raise InvalidOptionError(self.name, "el valor {0!r} no está entre {1}".format(invalid[0], list(self.choices)))

        if self.minimum is not None:
            if self.minimumExclusive and converted <= self.minimum:
                raise InvalidOptionError(self.name, "el valor {0!r} debe ser mayor que {1!r}".format(converted, self.minimum))
            if not self.minimumExclusive and converted < self.minimum:
                raise InvalidOptionError(self.name, "el valor {0!r} es menor que {1!r}".format(converted, self.minimum))

        if self.maximum is not None:
            if self.maximumExclusive and converted >= self.maximum:
                raise InvalidOptionError(self.name, "el valor {0!r} debe ser menor que {1!r}".format(converted, self.maximum))
            if not self.maximumExclusive and converted > self.maximum:
                raise InvalidOptionError(self.name, "el valor {0!r} es mayor que {1!r}".format(converted, self.maximum))

        return converted


class InvalidOptionError(ValueError):
    def __init__(self, optionName, message):
        super().__init__("{0}: {1}".format(optionName, message))
        self.optionName = optionName
